#include "r1c/baseline.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

#include "r1c/generator.hpp"

namespace r1c {

std::string to_string(NlsTermination t) {
    switch (t) {
        case NlsTermination::GradientTolerance: return "gradient_tolerance";
        case NlsTermination::FunctionTolerance: return "function_tolerance";
        case NlsTermination::StepTolerance: return "step_tolerance";
        case NlsTermination::MaxIterations: return "max_iterations";
        case NlsTermination::Stalled: return "stalled";
    }
    return "unknown";
}

namespace {

std::vector<std::size_t> offsets(const Dims& dims) {
    std::vector<std::size_t> off(dims.size() + 1, 0);
    for (std::size_t t = 0; t < dims.size(); ++t) off[t + 1] = off[t] + dims[t];
    return off;
}

Eigen::VectorXd stack(const std::vector<std::vector<double>>& u) {
    std::size_t n = 0;
    for (const auto& v : u) n += v.size();
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    Eigen::Index p = 0;
    for (const auto& v : u)
        for (double c : v) x(p++) = c;
    return x;
}

std::vector<std::vector<double>> unstack(const Eigen::VectorXd& x, const Dims& dims) {
    std::vector<std::vector<double>> u;
    Eigen::Index p = 0;
    for (std::size_t n : dims) {
        std::vector<double> v(n);
        for (double& c : v) c = x(p++);
        u.push_back(std::move(v));
    }
    return u;
}

void check_shape(const PartialTensor& tensor, const std::vector<std::vector<double>>& u) {
    if (u.size() != tensor.order()) throw std::invalid_argument("wrong number of factors");
    for (std::size_t t = 0; t < u.size(); ++t)
        if (u[t].size() != tensor.dims()[t])
            throw std::invalid_argument("factor " + std::to_string(t + 1) + " has the wrong length");
}

}  // namespace

Eigen::VectorXd nls_residual(const PartialTensor& tensor, const std::vector<std::vector<double>>& u) {
    check_shape(tensor, u);
    Eigen::VectorXd r(static_cast<Eigen::Index>(tensor.size()));
    Eigen::Index e = 0;
    for (const auto& entry : tensor.entries()) r(e++) = entry.value - outer_entry(u, entry.index);
    return r;
}

Eigen::SparseMatrix<double> nls_jacobian(const PartialTensor& tensor,
                                         const std::vector<std::vector<double>>& u) {
    check_shape(tensor, u);
    const std::size_t m = tensor.order();
    const auto off = offsets(tensor.dims());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(tensor.size() * m);
    std::vector<double> vals(m), prefix(m + 1), suffix(m + 1);
    Eigen::Index e = 0;
    for (const auto& entry : tensor.entries()) {
        for (std::size_t t = 0; t < m; ++t) vals[t] = u[t][entry.index[t] - 1];
        // products of all other factors without dividing by a possibly zero value
        prefix[0] = 1.0;
        for (std::size_t t = 0; t < m; ++t) prefix[t + 1] = prefix[t] * vals[t];
        suffix[m] = 1.0;
        for (std::size_t t = m; t-- > 0;) suffix[t] = suffix[t + 1] * vals[t];
        for (std::size_t t = 0; t < m; ++t)
            trips.emplace_back(e, static_cast<Eigen::Index>(off[t] + entry.index[t] - 1),
                               -prefix[t] * suffix[t + 1]);
        ++e;
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(tensor.size()),
                                  static_cast<Eigen::Index>(off.back()));
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

double nls_objective(const PartialTensor& tensor, const std::vector<std::vector<double>>& u) {
    return nls_residual(tensor, u).squaredNorm();
}

NlsResult nls_fit(const PartialTensor& tensor, const NlsOptions& options) {
    if (tensor.empty()) throw std::invalid_argument("cannot fit a tensor with no observations");
    const Dims& dims = tensor.dims();

    std::vector<std::vector<double>> u0;
    if (options.initial) {
        u0 = *options.initial;
        check_shape(tensor, u0);
    } else {
        Rng rng(options.seed, Stream::Factors);
        for (std::size_t n : dims) {
            std::vector<double> v(n);
            for (double& c : v) c = rng.normal();
            u0.push_back(std::move(v));
        }
    }

    NlsResult out;
    Eigen::VectorXd x = stack(u0);
    auto u = u0;
    Eigen::VectorXd r = nls_residual(tensor, u);
    double f = r.squaredNorm();
    out.objective_history.push_back(f);

    Eigen::SparseMatrix<double> J = nls_jacobian(tensor, u);
    Eigen::VectorXd g = J.transpose() * r;
    Eigen::SparseMatrix<double> H = J.transpose() * J;
    const Eigen::Index n = x.size();
    double lambda = options.initial_damping * H.diagonal().sum() / static_cast<double>(n);
    if (!(lambda > 0.0)) lambda = options.initial_damping;

    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

    out.termination = NlsTermination::MaxIterations;
    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
            out.termination = NlsTermination::GradientTolerance;
            break;
        }
        const Eigen::SparseMatrix<double> A = H + lambda * I;
        solver.compute(A);
        if (solver.info() != Eigen::Success) {
            lambda *= options.damping_factor;
            continue;
        }
        const Eigen::VectorXd step = solver.solve(-g);
        const Eigen::VectorXd x_new = x + step;
        const auto u_new = unstack(x_new, dims);
        const Eigen::VectorXd r_new = nls_residual(tensor, u_new);
        const double f_new = r_new.squaredNorm();
        const double predicted = f - (r + J * step).squaredNorm();
        const double rho = predicted > 0.0 ? (f - f_new) / predicted : -1.0;

        if (rho > options.accept_ratio && f_new < f) {
            const double drop = f - f_new;
            x = x_new;
            u = u_new;
            r = r_new;
            f = f_new;
            out.objective_history.push_back(f);
            lambda /= options.damping_factor;
            J = nls_jacobian(tensor, u);
            g = J.transpose() * r;
            H = J.transpose() * J;
            if (step.norm() <= options.step_tolerance * (options.step_tolerance + x.norm())) {
                out.termination = NlsTermination::StepTolerance;
                ++iter;
                break;
            }
            if (drop <= options.function_tolerance * f) {
                out.termination = NlsTermination::FunctionTolerance;
                ++iter;
                break;
            }
        } else {
            lambda *= options.damping_factor;
            if (lambda > 1e20) {
                out.termination = NlsTermination::Stalled;
                break;
            }
        }
    }
    out.iterations = iter;
    out.factors = std::move(u);
    out.objective = f;
    out.gradient_norm = g.lpNorm<Eigen::Infinity>();
    out.converged = out.termination != NlsTermination::MaxIterations &&
                    out.termination != NlsTermination::Stalled;
    return out;
}

}  // namespace r1c
