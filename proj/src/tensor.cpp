#include "r1c/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace r1c {

MultiIndex MultiIndex::drop(std::size_t mode) const {
    std::vector<std::size_t> out;
    out.reserve(coords_.size() - 1);
    for (std::size_t t = 0; t < coords_.size(); ++t)
        if (t != mode) out.push_back(coords_[t]);
    return MultiIndex(std::move(out));
}

MultiIndex MultiIndex::insert(std::size_t mode, std::size_t value) const {
    std::vector<std::size_t> out = coords_;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(mode), value);
    return MultiIndex(std::move(out));
}

bool MultiIndex::valid_for(const Dims& dims) const {
    if (coords_.size() != dims.size()) return false;
    for (std::size_t t = 0; t < dims.size(); ++t)
        if (coords_[t] < 1 || coords_[t] > dims[t]) return false;
    return true;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t t = 0; t < coords_.size(); ++t) os << (t ? "," : "") << coords_[t];
    os << ')';
    return os.str();
}

PartialTensor::PartialTensor(Dims dims, std::vector<Entry> entries)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
    if (dims_.empty()) throw std::invalid_argument("tensor order must be at least 1");
    for (std::size_t d : dims_)
        if (d == 0) throw std::invalid_argument("mode sizes must be positive");
    for (const auto& e : entries_)
        if (!e.index.valid_for(dims_))
            throw std::invalid_argument("index " + e.index.to_string() + " out of range");
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                  [](const Entry& a, const Entry& b) { return a.index == b.index; });
    if (dup != entries_.end())
        throw std::invalid_argument("duplicate index " + dup->index.to_string());
}

std::optional<double> PartialTensor::find(const MultiIndex& idx) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), idx,
                               [](const Entry& e, const MultiIndex& key) { return e.index < key; });
    if (it == entries_.end() || it->index != idx) return std::nullopt;
    return it->value;
}

double PartialTensor::full_size() const {
    double n = 1.0;
    for (std::size_t d : dims_) n *= static_cast<double>(d);
    return n;
}

FlattenedView flatten(const PartialTensor& tensor, std::size_t k) {
    if (tensor.order() < 2) throw std::invalid_argument("flatten requires order >= 2");
    if (k < 1 || k > tensor.order())
        throw std::invalid_argument("mode " + std::to_string(k) + " out of range");
    const std::size_t mode = k - 1;

    FlattenedView view;
    view.base_dims_ = tensor.dims();
    view.mode_ = k;

    view.row_labels_.reserve(tensor.size());
    for (const auto& e : tensor.entries()) {
        view.row_labels_.push_back(e.index.drop(mode));
        view.col_labels_.push_back(e.index[mode]);
    }
    std::sort(view.row_labels_.begin(), view.row_labels_.end());
    view.row_labels_.erase(std::unique(view.row_labels_.begin(), view.row_labels_.end()),
                           view.row_labels_.end());
    std::sort(view.col_labels_.begin(), view.col_labels_.end());
    view.col_labels_.erase(std::unique(view.col_labels_.begin(), view.col_labels_.end()),
                           view.col_labels_.end());

    view.obs_.reserve(tensor.size());
    for (const auto& e : tensor.entries()) {
        auto row = *view.row_position(e.index.drop(mode));
        view.obs_.push_back({row, e.index[mode], e.value});
    }
    std::sort(view.obs_.begin(), view.obs_.end(), [](const auto& a, const auto& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    return view;
}

std::optional<std::size_t> FlattenedView::row_position(const MultiIndex& label) const {
    auto it = std::lower_bound(row_labels_.begin(), row_labels_.end(), label);
    if (it == row_labels_.end() || *it != label) return std::nullopt;
    return static_cast<std::size_t>(it - row_labels_.begin());
}

namespace {

PartialTensor unflatten(const FlattenedView& view) {
    std::vector<Entry> entries;
    entries.reserve(view.observations().size());
    for (const auto& o : view.observations())
        entries.push_back({view.row_labels()[o.row].insert(view.mode() - 1, o.col), o.value});
    return PartialTensor(view.base_dims(), std::move(entries));
}

}  // namespace

FlattenedView FlattenedView::transposed() const {
    if (base_dims_.size() != 2)
        throw std::invalid_argument("transpose is defined for order-2 views only");
    return flatten(unflatten(*this), mode_ == 1 ? 2 : 1);
}

FlattenedView FlattenedView::scaled(double c) const {
    FlattenedView out = *this;
    for (auto& o : out.obs_) o.value *= c;
    return out;
}

PartialTensor reshape_solution(std::span<const double> x, const FlattenedView& view) {
    if (x.size() != view.row_labels().size())
        throw std::invalid_argument("solution has " + std::to_string(x.size()) +
                                    " values but the view has " +
                                    std::to_string(view.row_labels().size()) + " row labels");
    Dims dims = view.base_dims();
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(view.mode() - 1));
    std::vector<Entry> entries;
    entries.reserve(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) entries.push_back({view.row_labels()[r], x[r]});
    return PartialTensor(std::move(dims), std::move(entries));
}

double omega_norm(const PartialTensor& tensor) {
    double s = 0.0;
    for (const auto& e : tensor.entries()) s += e.value * e.value;
    return std::sqrt(s);
}

double outer_entry(std::span<const std::vector<double>> factors, const MultiIndex& idx) {
    double p = 1.0;
    for (std::size_t t = 0; t < factors.size(); ++t) p *= factors[t][idx[t] - 1];
    return p;
}

namespace {

void check_factors(const Dims& dims, std::span<const std::vector<double>> factors) {
    if (factors.size() != dims.size())
        throw std::invalid_argument("expected " + std::to_string(dims.size()) + " factors, got " +
                                    std::to_string(factors.size()));
    for (std::size_t t = 0; t < dims.size(); ++t)
        if (factors[t].size() != dims[t])
            throw std::invalid_argument("factor " + std::to_string(t + 1) + " has length " +
                                        std::to_string(factors[t].size()) + ", expected " +
                                        std::to_string(dims[t]));
}

}  // namespace

double residual_on_omega(const PartialTensor& tensor,
                         std::span<const std::vector<double>> factors) {
    check_factors(tensor.dims(), factors);
    double s = 0.0;
    for (const auto& e : tensor.entries()) {
        double d = e.value - outer_entry(factors, e.index);
        s += d * d;
    }
    return std::sqrt(s);
}

PartialTensor outer_on_pattern(const PartialTensor& pattern,
                               std::span<const std::vector<double>> factors) {
    check_factors(pattern.dims(), factors);
    return pattern.map_values(
        [&](const MultiIndex& idx, double) { return outer_entry(factors, idx); });
}

}  // namespace r1c
