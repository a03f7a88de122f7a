#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "r1c/tensor.hpp"

namespace r1c {

/// Raised when an iterative singular-value solve does not converge. Carries
/// the best iterate seen and its residual ||B v|| so callers can decide.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, Eigen::VectorXd best, double residual)
        : std::runtime_error(what), best_iterate(std::move(best)), residual(residual) {}

    Eigen::VectorXd best_iterate;
    double residual;
};

/// Raised when an operation's structural precondition does not hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Which pair of observations in one column group produced a row.
struct RowProvenance {
    std::size_t col_label = 0;  ///< 1-based mode-k coordinate j
    std::size_t first = 0;      ///< row-label position of the lexicographically smaller index
    std::size_t second = 0;     ///< row-label position of the larger index
};

/// Homogeneous pairwise-minor system in coordinate form.
class SparseSystem {
public:
    SparseSystem() = default;
    SparseSystem(std::size_t nrows, std::size_t ncols, std::vector<Triplet> triplets,
                 std::vector<RowProvenance> provenance = {},
                 std::vector<MultiIndex> col_labels = {});

    static SparseSystem from_dense(const Eigen::MatrixXd& dense);

    std::size_t nrows() const { return nrows_; }
    std::size_t ncols() const { return ncols_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    const std::vector<RowProvenance>& row_provenance() const { return provenance_; }
    const std::vector<MultiIndex>& col_labels() const { return col_labels_; }
    bool underdetermined() const { return nrows_ < ncols_; }

    Eigen::SparseMatrix<double> to_sparse() const;
    Eigen::MatrixXd to_dense() const;

private:
    std::size_t nrows_ = 0;
    std::size_t ncols_ = 0;
    std::vector<Triplet> triplets_;
    std::vector<RowProvenance> provenance_;
    std::vector<MultiIndex> col_labels_;
};

/// Rows enumerate unordered pairs within each column group, j ascending then
/// pairs lexicographic. The row for (i, i') with i < i' holds A_{i j} at
/// column i' and -A_{i' j} at column i.
SparseSystem build_system(const FlattenedView& view);

enum class SvdStrategy { Auto, Dense, Iterative };

struct SvdOptions {
    /// Relative rank tolerance; values <= tol * max(1, sigma_max) count as zero.
    /// Negative means max(nrows, ncols) * machine epsilon.
    double tol = -1.0;
    SvdStrategy strategy = SvdStrategy::Auto;
    /// Auto picks the dense path up to this many columns.
    std::size_t dense_limit = 64;
    std::size_t block_size = 4;
    std::size_t max_iterations = 300;
};

struct SingularTriplet {
    double sigma_min = 0.0;
    /// sigma_{n-1}, counting the n - nrows forced zeros of a wide system.
    std::optional<double> sigma_next;
    double sigma_max = 0.0;
    Eigen::VectorXd right_vector;
    /// sigma_{n-1} - sigma_n. Zero for a wide system with nullity above one.
    double gap = 0.0;
    bool underdetermined = false;
    /// Numerical nullity, as far as the solver resolved it.
    std::size_t nullspace_dim = 0;
};

/// Smallest right singular vector (tall or square) or a unit nullvector (wide).
/// The largest-magnitude entry of the returned vector is positive, ties
/// going to the lowest column.
SingularTriplet smallest_singular(const SparseSystem& system, const SvdOptions& options = {});

std::size_t nullspace_dimension(const SparseSystem& system, const SvdOptions& options = {});

/// All singular values in descending order, via dense SVD.
Eigen::VectorXd singular_values(const SparseSystem& system);

struct StabilityBound {
    double constant = 0.0;         ///< C_0 with ||dv|| <= C_0 ||dB||
    double admissible_radius = 0.0; ///< largest ||dB|| for which the bound holds
    double sigma_next = 0.0;        ///< sigma_{n-1}(B)
};

/// Nullvector perturbation constant for a system of nullity one:
/// 4 sqrt(2) / sigma_{n-1} when tall, 3 sqrt(2) / sigma_{n-1} when wide.
StabilityBound stability_constant(const SparseSystem& system, const SvdOptions& options = {});

/// Rank-one magnitude fit of the flattening: log|A_rj| ~ a_r + b_j in least
/// squares over the nonzero observations. Returns exp(a_r) per row label.
Eigen::VectorXd magnitude_estimate(const FlattenedView& view);

/// R B D with D = diag(column_scale) and R normalizing every nonzero row.
/// Both factors are nonsingular, so null vectors map back through x = D y.
struct BalancedSystem {
    SparseSystem system;
    Eigen::VectorXd column_scale;
};

BalancedSystem balance_system(const SparseSystem& system, const Eigen::VectorXd& column_scale);

/// Apply the sign convention used throughout: largest |entry| positive.
void fix_sign(Eigen::VectorXd& v);

}  // namespace r1c
