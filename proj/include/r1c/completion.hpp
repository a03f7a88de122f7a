#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "r1c/linsys.hpp"
#include "r1c/tensor.hpp"

namespace r1c {

/// How a level picks its mode.
///  MinSigma: smallest sigma_min, ties by largest gap, then lowest mode.
///  MaxGap:   largest gap sigma_{n-1} - sigma_n, ties by smallest sigma_min,
///            then lowest mode.
/// On exact data every completable mode has sigma_min = 0, so both agree.
/// With noise, MinSigma is drawn to structurally degenerate modes (exact
/// zeros from disconnected column groups) and MaxGap is not.
enum class ModeRule { MinSigma, MaxGap };

struct CompletionOptions {
    SvdOptions svd;
    ModeRule rule = ModeRule::MaxGap;
    /// Judge and solve each level on the balanced system: unknowns scaled by a
    /// log-domain magnitude estimate, rows normalized. Exact null vectors are
    /// unchanged; with noise this keeps the smallest singular vector from
    /// settling on a weakly attached part of the observation graph.
    bool balance = true;
    /// sigma_min values within tie_rel * (1 + max sigma_min) of the best count as
    /// tied; gaps within tie_rel * max gap likewise.
    double tie_rel = 1e-10;
    /// Value given to coordinates of the bottom vector that no observation reaches.
    double fill_value = 1.0;
    /// Per-level modes (original numbering) to use instead of the selection rule.
    std::vector<std::size_t> forced_modes;
};

/// Per-candidate statistics from one selection round, taken from the system
/// the level was judged on (balanced when the option is set).
struct ModeStats {
    std::size_t mode = 0;  ///< original 1-based mode
    double sigma_min = 0.0;
    double gap = 0.0;
    bool underdetermined = false;
    std::size_t nullspace_dim = 0;
    std::size_t nrows = 0;
    std::size_t ncols = 0;
    bool failed = false;  ///< the solver did not converge for this mode
};

struct LevelRecord {
    std::size_t level = 0;
    std::size_t chosen_mode = 0;  ///< original 1-based mode
    std::vector<ModeStats> candidates;
    Eigen::VectorXd x_star;
    bool underdetermined = false;
    std::size_t nullspace_dim = 0;
};

enum class CompletionStatus { Ok, Degraded, Failed };

std::string to_string(CompletionStatus status);

struct CompletionResult {
    std::vector<std::vector<double>> u;
    std::vector<LevelRecord> levels;
    /// A_1, ..., A_{m-1}: the reshaped nullvectors down the recursion.
    std::vector<PartialTensor> chain;
    double fit_residual = 0.0;
    CompletionStatus status = CompletionStatus::Ok;
    std::vector<std::string> diagnostics;
};

struct ModeSelection {
    std::size_t mode = 0;  ///< local 1-based mode of the tensor passed in
    std::vector<ModeStats> stats;
    SingularTriplet triplet;
    FlattenedView view;
};

/// Pick a mode by options.rule. `excluded` holds local 1-based modes.
/// `original_modes` (optional) relabels modes in the returned stats.
ModeSelection select_mode(const PartialTensor& tensor, const std::set<std::size_t>& excluded = {},
                          const CompletionOptions& options = {},
                          const std::vector<std::size_t>& original_modes = {});

struct Extraction {
    Eigen::VectorXd x_star;
    LevelRecord record;
    FlattenedView view;
};

/// Unit nullvector (or smallest right singular vector) of the mode-k system.
Extraction extract_vector(const PartialTensor& tensor, std::size_t k,
                          const CompletionOptions& options = {});

struct ModeSolve {
    std::vector<double> u;
    /// 1-based coordinates left at zero because nothing constrains them.
    std::vector<std::size_t> unconstrained;
};

/// Coordinate-wise least squares for mode k given the other m-1 factors in
/// mode order: u_k[j] = <w, a> / <w, w> over observations with i_k = j.
ModeSolve solve_mode_vector(const PartialTensor& tensor,
                            std::span<const std::vector<double>> other_factors, std::size_t k);

/// Recursive flattening completion. Throws std::invalid_argument on an empty
/// observation set; numerical breakdown yields status Failed.
CompletionResult complete(const PartialTensor& tensor, const CompletionOptions& options = {});

}  // namespace r1c
