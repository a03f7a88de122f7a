#include "r1c/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace r1c {

double sin_angle(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector lengths differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("zero vector has no angle");
    // norm of the component of a/|a| orthogonal to b/|b|; acos loses half the digits near 0
    const double na = std::sqrt(aa), nb = std::sqrt(bb), c = ab / (na * nb);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a[i] / na - c * b[i] / nb;
        s += r * r;
    }
    return std::min(1.0, std::sqrt(s));
}

Metrics completion_errors(std::span<const std::vector<double>> u_true,
                          std::span<const std::vector<double>> u_hat, double delta_norm,
                          const PartialTensor& omega, double runtime_seconds) {
    const std::size_t m = omega.order();
    if (u_true.size() != m || u_hat.size() != m)
        throw std::invalid_argument("expected " + std::to_string(m) + " factors");

    Metrics out;
    out.runtime_seconds = runtime_seconds;
    for (std::size_t t = 0; t < m; ++t) {
        if (u_true[t].size() != omega.dims()[t] || u_hat[t].size() != omega.dims()[t])
            throw std::invalid_argument("factor " + std::to_string(t + 1) + " has the wrong length");
        auto zero = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
        };
        if (zero(u_true[t]) || zero(u_hat[t]))
            throw std::invalid_argument("factor " + std::to_string(t + 1) + " is zero");
        out.sin_per_mode.push_back(sin_angle(u_true[t], u_hat[t]));
    }
    double s = 0.0;
    for (double v : out.sin_per_mode) s += v;
    out.sin_theta = s / static_cast<double>(m);

    double e = 0.0;
    for (const auto& entry : omega.entries()) {
        const double d = outer_entry(u_true, entry.index) - outer_entry(u_hat, entry.index);
        e += d * d;
    }
    out.err_ab = std::sqrt(e);
    out.err_rt_defined = delta_norm > 0.0;
    out.err_rt = out.err_rt_defined ? out.err_ab / delta_norm
                                    : std::numeric_limits<double>::quiet_NaN();
    out.density = static_cast<double>(omega.size()) / omega.full_size();
    return out;
}

}  // namespace r1c
