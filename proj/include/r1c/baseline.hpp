#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "r1c/tensor.hpp"

namespace r1c {

struct NlsOptions {
    std::size_t max_iterations = 400;
    /// Stop when ||J^T r||_inf falls below this.
    double gradient_tolerance = 1e-6;
    /// Stop when an accepted step lowers the objective by less than this
    /// fraction of its value.
    double function_tolerance = 1e-6;
    /// Stop when an accepted step is shorter than this relative to ||x||.
    double step_tolerance = 1e-6;
    /// Initial lambda as a multiple of the mean squared Jacobian column norm.
    double initial_damping = 1e-3;
    double damping_factor = 3.0;
    /// Accept a step when actual/predicted reduction exceeds this.
    double accept_ratio = 1e-4;
    std::uint64_t seed = 0;
    /// Start here instead of a random draw.
    std::optional<std::vector<std::vector<double>>> initial;
};

enum class NlsTermination { GradientTolerance, FunctionTolerance, StepTolerance, MaxIterations, Stalled };

std::string to_string(NlsTermination t);

struct NlsResult {
    std::vector<std::vector<double>> factors;
    double objective = 0.0;  ///< sum of squared residuals on Omega
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    NlsTermination termination = NlsTermination::MaxIterations;
    bool converged = false;  ///< any termination other than MaxIterations / Stalled
    std::vector<double> objective_history;  ///< after every accepted step, starting point first
};

/// Residuals r_e = A_e - prod_t u_t[i_t], one per observation, in entry order.
Eigen::VectorXd nls_residual(const PartialTensor& tensor, const std::vector<std::vector<double>>& u);

/// Jacobian of nls_residual with respect to the stacked factors (u_1; ...; u_m).
Eigen::SparseMatrix<double> nls_jacobian(const PartialTensor& tensor,
                                         const std::vector<std::vector<double>>& u);

double nls_objective(const PartialTensor& tensor, const std::vector<std::vector<double>>& u);

/// Levenberg-Marquardt fit of a rank-one tensor to the observed entries.
NlsResult nls_fit(const PartialTensor& tensor, const NlsOptions& options = {});

}  // namespace r1c
