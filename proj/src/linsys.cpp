#include "r1c/linsys.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace r1c {

SparseSystem::SparseSystem(std::size_t nrows, std::size_t ncols, std::vector<Triplet> triplets,
                           std::vector<RowProvenance> provenance,
                           std::vector<MultiIndex> col_labels)
    : nrows_(nrows),
      ncols_(ncols),
      triplets_(std::move(triplets)),
      provenance_(std::move(provenance)),
      col_labels_(std::move(col_labels)) {
    for (const auto& t : triplets_)
        if (t.row >= nrows_ || t.col >= ncols_)
            throw std::invalid_argument("triplet outside a " + std::to_string(nrows_) + "x" +
                                        std::to_string(ncols_) + " system");
    if (!provenance_.empty() && provenance_.size() != nrows_)
        throw std::invalid_argument("row provenance must cover every row");
    if (!col_labels_.empty() && col_labels_.size() != ncols_)
        throw std::invalid_argument("column labels must cover every column");
}

SparseSystem SparseSystem::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<Triplet> trips;
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
        for (Eigen::Index i = 0; i < dense.rows(); ++i)
            if (dense(i, j) != 0.0)
                trips.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), dense(i, j)});
    return SparseSystem(static_cast<std::size_t>(dense.rows()),
                        static_cast<std::size_t>(dense.cols()), std::move(trips));
}

Eigen::SparseMatrix<double> SparseSystem::to_sparse() const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(triplets_.size());
    for (const auto& t : triplets_)
        trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(nrows_),
                                  static_cast<Eigen::Index>(ncols_));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

Eigen::MatrixXd SparseSystem::to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nrows_),
                                              static_cast<Eigen::Index>(ncols_));
    for (const auto& t : triplets_)
        m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
    return m;
}

SparseSystem build_system(const FlattenedView& view) {
    const auto& obs = view.observations();
    std::vector<Triplet> trips;
    std::vector<RowProvenance> prov;
    std::size_t row = 0;

    for (std::size_t begin = 0; begin < obs.size();) {
        std::size_t end = begin;
        while (end < obs.size() && obs[end].col == obs[begin].col) ++end;
        for (std::size_t a = begin; a < end; ++a) {
            for (std::size_t b = a + 1; b < end; ++b) {
                // A_{i j} x_{i'} - A_{i' j} x_i = 0 with i = obs[a], i' = obs[b]
                if (obs[a].value != 0.0) trips.push_back({row, obs[b].row, obs[a].value});
                if (obs[b].value != 0.0) trips.push_back({row, obs[a].row, -obs[b].value});
                prov.push_back({obs[a].col, obs[a].row, obs[b].row});
                ++row;
            }
        }
        begin = end;
    }
    return SparseSystem(row, view.row_labels().size(), std::move(trips), std::move(prov),
                        view.row_labels());
}

Eigen::VectorXd magnitude_estimate(const FlattenedView& view) {
    const std::size_t nr = view.row_labels().size();
    const auto n = static_cast<Eigen::Index>(nr + view.base_dims()[view.mode() - 1]);
    // normal equations of the bipartite log fit; the ridge pins each component's shift
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (const auto& o : view.observations()) {
        if (o.value == 0.0) continue;
        const auto a = static_cast<Eigen::Index>(o.row);
        const auto b = static_cast<Eigen::Index>(nr + o.col - 1);
        const double l = std::log(std::abs(o.value));
        trips.emplace_back(a, a, 1.0);
        trips.emplace_back(b, b, 1.0);
        trips.emplace_back(a, b, 1.0);
        trips.emplace_back(b, a, 1.0);
        rhs(a) += l;
        rhs(b) += l;
    }
    for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, 1e-8);
    Eigen::SparseMatrix<double> normal(n, n);
    normal.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(normal);
    Eigen::VectorXd out = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(nr));
    if (ldlt.info() != Eigen::Success) return out;
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    for (Eigen::Index r = 0; r < out.size(); ++r) {
        const double m = std::exp(sol(r));
        if (std::isfinite(m) && m > 0.0) out(r) = m;
    }
    return out;
}

BalancedSystem balance_system(const SparseSystem& sys, const Eigen::VectorXd& column_scale) {
    if (static_cast<std::size_t>(column_scale.size()) != sys.ncols())
        throw PreconditionError("column scale length does not match the system");
    std::vector<Triplet> trips = sys.triplets();
    std::vector<double> row_sq(sys.nrows(), 0.0);
    for (auto& t : trips) {
        t.value *= column_scale(static_cast<Eigen::Index>(t.col));
        row_sq[t.row] += t.value * t.value;
    }
    for (auto& t : trips)
        if (row_sq[t.row] > 0.0) t.value /= std::sqrt(row_sq[t.row]);
    return {SparseSystem(sys.nrows(), sys.ncols(), std::move(trips), sys.row_provenance(),
                         sys.col_labels()),
            column_scale};
}

void fix_sign(Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    const double top = v.cwiseAbs().maxCoeff();
    // near-equal magnitudes count as a tie so the lowest index decides
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= top * (1.0 - 1e-8)) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double relative_tol(const SparseSystem& sys, const SvdOptions& opt) {
    if (opt.tol >= 0) return opt.tol;
    return static_cast<double>(std::max(sys.nrows(), sys.ncols())) * kEps;
}

bool use_dense(const SparseSystem& sys, const SvdOptions& opt) {
    switch (opt.strategy) {
        case SvdStrategy::Dense: return true;
        case SvdStrategy::Iterative: return false;
        case SvdStrategy::Auto: break;
    }
    return sys.ncols() <= opt.dense_limit;
}

// Unit vector in span(basis) closest to the first coordinate axis that the
// span reaches. Independent of which orthonormal basis was handed in.
Eigen::VectorXd canonical_null_vector(const Eigen::MatrixXd& basis) {
    for (Eigen::Index p = 0; p < basis.rows(); ++p) {
        if (basis.row(p).norm() > 1e-6) {
            Eigen::VectorXd v = basis * basis.row(p).transpose();
            return v / v.norm();
        }
    }
    return basis.col(0);
}

struct Spectrum {
    Eigen::VectorXd values;     // ascending, the smallest ones resolved
    Eigen::MatrixXd vectors;    // matching right singular vectors
    double sigma_max = 0.0;
};

Spectrum dense_spectrum(const SparseSystem& sys) {
    const Eigen::Index l = static_cast<Eigen::Index>(sys.nrows());
    const Eigen::Index n = static_cast<Eigen::Index>(sys.ncols());
    Spectrum out;
    Eigen::MatrixXd b = sys.to_dense();
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
    if (l == 0) {
        out.values = Eigen::VectorXd::Zero(n);
        out.vectors = Eigen::MatrixXd::Identity(n, n);
        return out;
    }
    if (l > n) {
        // same singular values and right vectors as B, on an n x n problem
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
        Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
        s = svd.singularValues();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
        s = svd.singularValues();
        v = svd.matrixV();
    }
    const Eigen::Index k = s.size();
    out.sigma_max = k > 0 ? s(0) : 0.0;
    // columns of V past the singular values span the forced nullspace
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n - k; ++i) {
        out.values(i) = 0.0;
        out.vectors.col(i) = v.col(n - 1 - i);
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        out.values(n - k + i) = s(k - 1 - i);
        out.vectors.col(n - k + i) = v.col(k - 1 - i);
    }
    return out;
}

double estimate_sigma_max(const Eigen::SparseMatrix<double>& b) {
    if (b.nonZeros() == 0) return 0.0;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(b.cols());
    // deterministic start that is not orthogonal to the top singular vector
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 0.01 * static_cast<double>(i % 7);
    x.normalize();
    double est = 0.0;
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd y = b.transpose() * (b * x);
        double ny = y.norm();
        if (ny == 0.0) break;
        double next = std::sqrt(ny);
        x = y / ny;
        if (std::abs(next - est) <= 1e-6 * next) {
            est = next;
            break;
        }
        est = next;
    }
    return est;
}

// Shifted block inverse iteration on B^T B; Ritz values are taken from B itself
// so small singular values are not squared.
Spectrum iterative_spectrum(const SparseSystem& sys, const SvdOptions& opt, std::size_t block) {
    const Eigen::Index n = static_cast<Eigen::Index>(sys.ncols());
    Spectrum out;
    Eigen::SparseMatrix<double> b = sys.to_sparse();
    out.sigma_max = estimate_sigma_max(b);
    const Eigen::Index bs = std::min<Eigen::Index>(static_cast<Eigen::Index>(block), n);

    Eigen::SparseMatrix<double> gram = (b.transpose() * b).pruned();
    const double gram_norm = std::max(out.sigma_max * out.sigma_max, 1e-300);
    double shift = 1e-12 * gram_norm;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::SparseMatrix<double> eye(n, n);
    eye.setIdentity();
    for (int attempt = 0;; ++attempt) {
        ldlt.compute(gram + shift * eye);
        if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) break;
        if (attempt > 6) throw NumericalError("Gram factorization failed", Eigen::VectorXd::Zero(n), -1.0);
        shift *= 100.0;
    }

    std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd q(n, bs);
    for (Eigen::Index j = 0; j < bs; ++j)
        for (Eigen::Index i = 0; i < n; ++i) q(i, j) = unif(rng);

    Eigen::VectorXd ritz;
    Eigen::MatrixXd vecs;
    double best_res = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    const double target = 1e-13 * gram_norm;
    const Eigen::Index watch = std::min<Eigen::Index>(2, bs);
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        Eigen::MatrixXd w = ldlt.solve(q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
        q = qr.householderQ() * Eigen::MatrixXd::Identity(n, bs);

        Eigen::MatrixXd bq = b * q;
        Eigen::JacobiSVD<Eigen::MatrixXd> small(bq, Eigen::ComputeFullV);
        // JacobiSVD sorts descending; we want ascending, padding forced zeros
        Eigen::VectorXd s = Eigen::VectorXd::Zero(bs);
        const Eigen::Index k = small.singularValues().size();
        for (Eigen::Index i = 0; i < k; ++i) s(bs - k + i) = small.singularValues()(k - 1 - i);
        Eigen::MatrixXd y(bs, bs);
        for (Eigen::Index i = 0; i < bs; ++i) y.col(i) = small.matrixV().col(bs - 1 - i);
        ritz = s;
        vecs = q * y;
        q = vecs;

        double worst = 0.0;
        for (Eigen::Index i = 0; i < watch; ++i) {
            Eigen::VectorXd r = b.transpose() * (b * vecs.col(i)) - ritz(i) * ritz(i) * vecs.col(i);
            worst = std::max(worst, r.norm());
            if (i == 0 && r.norm() < best_res) {
                best_res = r.norm();
                best = vecs.col(0);
            }
        }
        if (it >= 2 && worst <= target) {
            out.values = ritz;
            out.vectors = vecs;
            return out;
        }
    }
    // the gap pair may stall when sigma_{n-1} is tightly clustered; accept if the
    // bottom pair itself converged
    if (best_res <= target) {
        out.values = ritz;
        out.vectors = vecs;
        return out;
    }
    if (best.size() == 0) best = Eigen::VectorXd::Zero(n);
    throw NumericalError("smallest singular vector did not converge", best,
                         best_res == std::numeric_limits<double>::infinity() ? -1.0
                                                                           : (b * best).norm());
}

Spectrum compute_spectrum(const SparseSystem& sys, const SvdOptions& opt, std::size_t block) {
    if (use_dense(sys, opt)) return dense_spectrum(sys);
    return iterative_spectrum(sys, opt, block);
}

std::size_t count_null(const Spectrum& sp, double abs_tol) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < sp.values.size(); ++i)
        if (sp.values(i) <= abs_tol) ++count;
    return count;
}

}  // namespace

SingularTriplet smallest_singular(const SparseSystem& sys, const SvdOptions& opt) {
    if (sys.ncols() == 0) throw std::invalid_argument("system has no columns");
    const Spectrum sp = compute_spectrum(sys, opt, opt.block_size);
    const double abs_tol = relative_tol(sys, opt) * std::max(1.0, sp.sigma_max);

    SingularTriplet out;
    out.sigma_max = sp.sigma_max;
    out.underdetermined = sys.underdetermined();
    out.nullspace_dim = count_null(sp, abs_tol);

    if (out.nullspace_dim > 1) {
        out.right_vector = canonical_null_vector(
            sp.vectors.leftCols(static_cast<Eigen::Index>(out.nullspace_dim)));
    } else {
        out.right_vector = sp.vectors.col(0);
    }
    out.right_vector.normalize();
    fix_sign(out.right_vector);

    // a wide system has n singular values counting the forced zeros
    out.sigma_min = out.underdetermined ? 0.0 : sp.values(0);
    if (sp.values.size() >= 2) {
        out.sigma_next = sp.values(1);
        out.gap = sp.values(1) - out.sigma_min;
    }
    return out;
}

std::size_t nullspace_dimension(const SparseSystem& sys, const SvdOptions& opt) {
    if (sys.ncols() == 0) throw std::invalid_argument("system has no columns");
    std::size_t block = opt.block_size;
    for (;;) {
        const Spectrum sp = compute_spectrum(sys, opt, block);
        const double abs_tol = relative_tol(sys, opt) * std::max(1.0, sp.sigma_max);
        const std::size_t count = count_null(sp, abs_tol);
        if (count < static_cast<std::size_t>(sp.values.size()) || block >= sys.ncols())
            return count;
        // every resolved value is null; widen the block until one is not
        block = std::min(sys.ncols(), block * 2);
    }
}

Eigen::VectorXd singular_values(const SparseSystem& sys) {
    if (sys.nrows() == 0 || sys.ncols() == 0) return {};
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.to_dense());
    return svd.singularValues();
}

StabilityBound stability_constant(const SparseSystem& sys, const SvdOptions& opt) {
    if (sys.ncols() < 2) throw PreconditionError("stability constant needs at least two columns");
    SvdOptions dense = opt;
    dense.strategy = SvdStrategy::Dense;
    const Spectrum sp = dense_spectrum(sys);
    const double abs_tol = relative_tol(sys, dense) * std::max(1.0, sp.sigma_max);
    const std::size_t nullity = count_null(sp, abs_tol);
    if (nullity != 1)
        throw PreconditionError("stability constant requires nullity 1, found " +
                                std::to_string(nullity));
    StabilityBound out;
    out.sigma_next = sp.values(1);
    const double factor = sys.underdetermined() ? 3.0 : 4.0;
    out.constant = factor * std::sqrt(2.0) / out.sigma_next;
    out.admissible_radius = out.sigma_next / factor;
    return out;
}

}  // namespace r1c
