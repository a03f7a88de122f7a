#include "r1c/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace r1c {

ExtractabilityDiagnostics is_extractable(const FlattenedView& view, const SvdOptions& options) {
    ExtractabilityDiagnostics d;
    const SparseSystem sys = build_system(view);
    d.nrows = sys.nrows();
    d.ncols = sys.ncols();
    if (sys.ncols() == 0) return d;
    const SingularTriplet trip = smallest_singular(sys, options);
    d.nullspace_dim = nullspace_dimension(sys, options);
    d.sigma_min = trip.sigma_min;
    d.sigma_next = trip.sigma_next;
    d.gap = trip.gap;
    d.underdetermined = trip.underdetermined;
    d.extractable = d.nullspace_dim == 1;
    return d;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

bool bipartite_connected(const FlattenedView& view) {
    const std::size_t n_cols = view.base_dims()[view.mode() - 1];
    const bool matrix = view.base_dims().size() == 2;
    const std::size_t n_rows =
        matrix ? view.base_dims()[view.mode() == 1 ? 1 : 0] : view.row_labels().size();
    if (n_rows + n_cols == 0) return true;

    // row vertices first, then column vertices
    auto row_vertex = [&](std::size_t pos) {
        return matrix ? view.row_labels()[pos][0] - 1 : pos;
    };
    UnionFind uf(n_rows + n_cols);
    for (const auto& o : view.observations()) uf.unite(row_vertex(o.row), n_rows + o.col - 1);
    const std::size_t root = uf.find(0);
    for (std::size_t v = 1; v < n_rows + n_cols; ++v)
        if (uf.find(v) != root) return false;
    return true;
}

bool is_mod_full(const PartialTensor& tensor, std::size_t t) {
    if (t < 1 || t > tensor.order()) throw std::invalid_argument("mode out of range");
    std::vector<bool> seen(tensor.dims()[t - 1], false);
    for (const auto& e : tensor.entries()) seen[e.index[t - 1] - 1] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<std::size_t> near_zero_entries(const Eigen::VectorXd& v, double rel) {
    std::vector<std::size_t> out;
    if (v.size() == 0) return out;
    const double top = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) <= rel * top) out.push_back(static_cast<std::size_t>(i));
    return out;
}

namespace {

bool search_chain(const PartialTensor& tensor, const std::vector<std::size_t>& modes,
                  const SvdOptions& options, std::vector<WitnessStep>& chain) {
    const std::size_t m = tensor.order();
    for (std::size_t k = 1; k <= m; ++k) {
        const FlattenedView view = flatten(tensor, k);
        const SparseSystem sys = build_system(view);
        if (sys.ncols() == 0) continue;
        const std::size_t nullity = nullspace_dimension(sys, options);
        if (nullity != 1) continue;
        chain.push_back({modes[k - 1], nullity});
        if (m == 2) return true;

        const SingularTriplet trip = smallest_singular(sys, options);
        const PartialTensor next = reshape_solution(
            std::span<const double>(trip.right_vector.data(),
                                    static_cast<std::size_t>(trip.right_vector.size())),
            view);
        std::vector<std::size_t> rest = modes;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k - 1));
        if (search_chain(next, rest, options, chain)) return true;
        chain.pop_back();
    }
    return false;
}

}  // namespace

std::vector<std::string> verify_unique_completion_hypotheses(const PartialTensor& tensor) {
    std::vector<std::string> out;
    for (std::size_t t = 1; t <= tensor.order(); ++t)
        if (!is_mod_full(tensor, t))
            out.push_back("mod-" + std::to_string(t) + " fullness violated");
    for (const auto& e : tensor.entries())
        if (e.value == 0.0)
            out.push_back("nonzero-entries violated at " + e.index.to_string());
    return out;
}

AnalysisReport is_determinable(const PartialTensor& tensor, const SvdOptions& options) {
    if (tensor.order() < 2) throw std::invalid_argument("determinability needs order >= 2");
    AnalysisReport report;
    report.connected = true;
    for (std::size_t k = 1; k <= tensor.order(); ++k) {
        const FlattenedView view = flatten(tensor, k);
        report.extractable_per_mode[k] = is_extractable(view, options);
        const bool conn = bipartite_connected(view);
        report.connected_per_mode[k] = conn;
        report.connected = report.connected && conn;
        report.mod_full[k] = is_mod_full(tensor, k);
    }
    report.nonzero_entries = std::none_of(tensor.entries().begin(), tensor.entries().end(),
                                          [](const Entry& e) { return e.value == 0.0; });
    report.violated_hypotheses = verify_unique_completion_hypotheses(tensor);

    std::vector<std::size_t> modes(tensor.order());
    std::iota(modes.begin(), modes.end(), 1);
    std::vector<WitnessStep> chain;
    report.determinable = search_chain(tensor, modes, options, chain);
    if (report.determinable) report.witness_chain = std::move(chain);
    return report;
}

}  // namespace r1c
