#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace r1c {

using Dims = std::vector<std::size_t>;

/// Tuple of 1-based coordinates, one per mode.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<std::size_t> coords) : coords_(coords) {}
    explicit MultiIndex(std::vector<std::size_t> coords) : coords_(std::move(coords)) {}

    std::size_t order() const { return coords_.size(); }
    std::size_t operator[](std::size_t mode) const { return coords_[mode]; }
    std::size_t& operator[](std::size_t mode) { return coords_[mode]; }
    const std::vector<std::size_t>& coords() const { return coords_; }

    /// Copy with the (0-based) mode removed.
    MultiIndex drop(std::size_t mode) const;
    /// Copy with `value` inserted at (0-based) position `mode`.
    MultiIndex insert(std::size_t mode, std::size_t value) const;

    bool valid_for(const Dims& dims) const;
    std::string to_string() const;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<std::size_t> coords_;
};

/// A multi-index with one mode removed. Coordinates keep the original mode
/// order; `dropped_mode` is 1-based. Ordering is lexicographic on coords.
struct ReducedIndex {
    MultiIndex coords;
    std::size_t dropped_mode = 1;

    friend bool operator==(const ReducedIndex&, const ReducedIndex&) = default;
    friend std::strong_ordering operator<=>(const ReducedIndex& a, const ReducedIndex& b) {
        if (auto c = a.dropped_mode <=> b.dropped_mode; c != 0) return c;
        return a.coords <=> b.coords;
    }
};

struct Entry {
    MultiIndex index;
    double value = 0.0;
};

/// Partially observed tensor: dimensions plus values on the observation set.
/// Entries are kept sorted lexicographically by index. Immutable once built.
class PartialTensor {
public:
    PartialTensor() = default;

    /// Throws std::invalid_argument on empty dims, zero-sized modes,
    /// out-of-range or wrong-order indices, and duplicate indices.
    PartialTensor(Dims dims, std::vector<Entry> entries);

    std::size_t order() const { return dims_.size(); }
    const Dims& dims() const { return dims_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::span<const Entry> entries() const { return entries_; }

    std::optional<double> find(const MultiIndex& idx) const;
    bool contains(const MultiIndex& idx) const { return find(idx).has_value(); }

    /// Same observation set, values transformed.
    template <class F>
    PartialTensor map_values(F&& f) const {
        PartialTensor out = *this;
        for (auto& e : out.entries_) e.value = f(e.index, e.value);
        return out;
    }

    PartialTensor scaled(double c) const {
        return map_values([c](const MultiIndex&, double v) { return c * v; });
    }

    /// Number of cells in the full tensor (as a double; it overflows size_t quickly).
    double full_size() const;

private:
    Dims dims_;
    std::vector<Entry> entries_;
};

/// The k-th flattening restricted to observed cells. Rows are the distinct
/// reduced indices (sorted), columns the distinct mode-k coordinates (sorted).
class FlattenedView {
public:
    struct Observation {
        std::size_t row = 0;    ///< position in row_labels()
        std::size_t col = 0;    ///< 1-based mode-k coordinate
        double value = 0.0;
    };

    const Dims& base_dims() const { return base_dims_; }
    /// 1-based mode that indexes the columns.
    std::size_t mode() const { return mode_; }
    const std::vector<MultiIndex>& row_labels() const { return row_labels_; }
    const std::vector<std::size_t>& col_labels() const { return col_labels_; }
    /// Sorted by (col, row).
    const std::vector<Observation>& observations() const { return obs_; }

    std::optional<std::size_t> row_position(const MultiIndex& label) const;
    ReducedIndex row_label(std::size_t pos) const { return {row_labels_[pos], mode_}; }

    /// The transposed pattern of an order-2 view: the same matrix seen with the
    /// other mode as columns. Only valid when base_dims has two modes.
    FlattenedView transposed() const;

    FlattenedView scaled(double c) const;

private:
    friend FlattenedView flatten(const PartialTensor&, std::size_t);

    Dims base_dims_;
    std::size_t mode_ = 1;
    std::vector<MultiIndex> row_labels_;
    std::vector<std::size_t> col_labels_;
    std::vector<Observation> obs_;
};

/// Mode-k flattening (k is 1-based). Requires order >= 2.
FlattenedView flatten(const PartialTensor& tensor, std::size_t k);

/// Reshape a vector aligned with view.row_labels() into the order-(m-1)
/// partial tensor observed exactly on those labels.
PartialTensor reshape_solution(std::span<const double> x, const FlattenedView& view);

/// sqrt of the sum of squared observed values.
double omega_norm(const PartialTensor& tensor);

/// Product of factor coordinates at a 1-based multi-index.
double outer_entry(std::span<const std::vector<double>> factors, const MultiIndex& idx);

/// || A - u_1 (x) ... (x) u_m ||_Omega.
double residual_on_omega(const PartialTensor& tensor,
                         std::span<const std::vector<double>> factors);

/// Evaluate u_1 (x) ... (x) u_m on a given observation pattern.
PartialTensor outer_on_pattern(const PartialTensor& pattern,
                               std::span<const std::vector<double>> factors);

}  // namespace r1c
