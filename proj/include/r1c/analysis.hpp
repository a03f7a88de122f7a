#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "r1c/linsys.hpp"
#include "r1c/tensor.hpp"

namespace r1c {

struct ExtractabilityDiagnostics {
    bool extractable = false;
    std::size_t nullspace_dim = 0;
    double sigma_min = 0.0;
    std::optional<double> sigma_next;
    double gap = 0.0;
    bool underdetermined = false;
    std::size_t nrows = 0;
    std::size_t ncols = 0;
};

/// True iff the pairwise-minor system of the view has a one-dimensional
/// solution space at the given tolerance.
ExtractabilityDiagnostics is_extractable(const FlattenedView& view, const SvdOptions& options = {});

/// Connectivity of the bipartite graph between row and column vertices with
/// the observations as edges. Column vertices are all of [n_k]. Row vertices
/// are all of [n] for an order-2 base and the observed row labels otherwise.
/// Isolated vertices make the graph disconnected.
bool bipartite_connected(const FlattenedView& view);

/// Every coordinate of mode t (1-based) appears in some observed index.
bool is_mod_full(const PartialTensor& tensor, std::size_t t);

struct WitnessStep {
    std::size_t mode = 0;           ///< mode of the original tensor, 1-based
    std::size_t nullspace_dim = 0;
};

struct AnalysisReport {
    std::map<std::size_t, ExtractabilityDiagnostics> extractable_per_mode;
    std::map<std::size_t, bool> connected_per_mode;
    bool connected = false;
    std::map<std::size_t, bool> mod_full;
    bool nonzero_entries = false;
    bool determinable = false;
    std::optional<std::vector<WitnessStep>> witness_chain;
    std::vector<std::string> violated_hypotheses;
};

/// Recursive determinability check. Modes are tried in ascending order and a
/// failed branch backtracks to the next mode; the first full chain is kept.
AnalysisReport is_determinable(const PartialTensor& tensor, const SvdOptions& options = {});

/// Hypotheses of the uniqueness theorems that fail: mod-t fullness per mode
/// and nonzero observed values. Empty means all hold.
std::vector<std::string> verify_unique_completion_hypotheses(const PartialTensor& tensor);

/// Entries of a unit vector with magnitude below 1e-8 of the largest one.
std::vector<std::size_t> near_zero_entries(const Eigen::VectorXd& v, double rel = 1e-8);

}  // namespace r1c
