#pragma once

#include <span>
#include <vector>

#include "r1c/tensor.hpp"

namespace r1c {

struct Metrics {
    double err_ab = 0.0;
    /// err_ab / ||dA||_Omega; NaN when the noise norm is zero.
    double err_rt = 0.0;
    bool err_rt_defined = false;
    double sin_theta = 0.0;  ///< mean over modes of |sin theta_k|
    std::vector<double> sin_per_mode;
    double density = 0.0;
    double runtime_seconds = 0.0;
};

/// |sin| of the angle between two nonzero vectors, accurate for tiny angles.
double sin_angle(std::span<const double> a, std::span<const double> b);

/// Errors of an estimate against the truth. err_ab is measured on the
/// observation pattern of `omega` (its values are ignored).
Metrics completion_errors(std::span<const std::vector<double>> u_true,
                          std::span<const std::vector<double>> u_hat, double delta_norm,
                          const PartialTensor& omega, double runtime_seconds = 0.0);

}  // namespace r1c
