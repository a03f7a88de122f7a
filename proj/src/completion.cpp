#include "r1c/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace r1c {

std::string to_string(CompletionStatus status) {
    switch (status) {
        case CompletionStatus::Ok: return "ok";
        case CompletionStatus::Degraded: return "degraded";
        case CompletionStatus::Failed: return "failed";
    }
    return "unknown";
}

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

std::size_t original_mode(const std::vector<std::size_t>& original_modes, std::size_t k) {
    return original_modes.empty() ? k : original_modes[k - 1];
}

ModeStats stats_from(const SparseSystem& sys, const SingularTriplet& trip, std::size_t mode) {
    ModeStats s;
    s.mode = mode;
    s.sigma_min = trip.sigma_min;
    s.gap = trip.gap;
    s.underdetermined = trip.underdetermined;
    s.nullspace_dim = trip.nullspace_dim;
    s.nrows = sys.nrows();
    s.ncols = sys.ncols();
    return s;
}

// Smallest singular triplet of the judged system, vector in original coordinates.
SingularTriplet solve_level(const FlattenedView& view, const SparseSystem& sys,
                            const CompletionOptions& options) {
    if (!options.balance) return smallest_singular(sys, options.svd);
    const BalancedSystem balanced = balance_system(sys, magnitude_estimate(view));
    SingularTriplet trip = smallest_singular(balanced.system, options.svd);
    Eigen::VectorXd x = trip.right_vector.cwiseProduct(balanced.column_scale);
    x.normalize();
    fix_sign(x);
    trip.right_vector = std::move(x);
    return trip;
}

}  // namespace

ModeSelection select_mode(const PartialTensor& tensor, const std::set<std::size_t>& excluded,
                          const CompletionOptions& options,
                          const std::vector<std::size_t>& original_modes) {
    if (tensor.order() < 2) throw std::invalid_argument("mode selection needs order >= 2");

    struct Candidate {
        std::size_t k;
        FlattenedView view;
        SingularTriplet trip;
    };
    std::vector<Candidate> candidates;
    ModeSelection out;
    for (std::size_t k = 1; k <= tensor.order(); ++k) {
        if (excluded.count(k)) continue;
        FlattenedView view = flatten(tensor, k);
        const SparseSystem sys = build_system(view);
        try {
            SingularTriplet trip = solve_level(view, sys, options);
            out.stats.push_back(stats_from(sys, trip, original_mode(original_modes, k)));
            candidates.push_back({k, std::move(view), std::move(trip)});
        } catch (const NumericalError&) {
            ModeStats s;
            s.mode = original_mode(original_modes, k);
            s.nrows = sys.nrows();
            s.ncols = sys.ncols();
            s.failed = true;
            out.stats.push_back(s);
        }
    }
    if (candidates.empty()) {
        if (out.stats.empty()) throw std::invalid_argument("every mode is excluded");
        throw NumericalError("no candidate mode produced a singular vector", {}, -1.0);
    }

    double best_sigma = std::numeric_limits<double>::infinity();
    double top_sigma = 0.0;
    double top_gap = 0.0;
    for (const auto& c : candidates) {
        best_sigma = std::min(best_sigma, c.trip.sigma_min);
        top_sigma = std::max(top_sigma, c.trip.sigma_min);
        top_gap = std::max(top_gap, c.trip.gap);
    }
    const double sigma_band = options.tie_rel * (1.0 + top_sigma);
    const double gap_band = options.tie_rel * top_gap;

    // candidates arrive in ascending k, so only a strict improvement moves on
    const Candidate* chosen = nullptr;
    for (const auto& c : candidates) {
        if (chosen == nullptr) {
            if (options.rule == ModeRule::MaxGap || c.trip.sigma_min <= best_sigma + sigma_band)
                chosen = &c;
            continue;
        }
        if (options.rule == ModeRule::MinSigma) {
            if (c.trip.sigma_min > best_sigma + sigma_band) continue;
            if (c.trip.gap > chosen->trip.gap + gap_band) chosen = &c;
        } else {
            if (c.trip.gap > chosen->trip.gap + gap_band ||
                (c.trip.gap >= chosen->trip.gap - gap_band &&
                 c.trip.sigma_min < chosen->trip.sigma_min - sigma_band))
                chosen = &c;
        }
    }
    out.mode = chosen->k;
    out.triplet = chosen->trip;
    out.view = chosen->view;
    return out;
}

Extraction extract_vector(const PartialTensor& tensor, std::size_t k,
                          const CompletionOptions& options) {
    Extraction out;
    out.view = flatten(tensor, k);
    const SparseSystem sys = build_system(out.view);
    const SingularTriplet trip = solve_level(out.view, sys, options);
    out.x_star = trip.right_vector;
    out.record.chosen_mode = k;
    out.record.candidates.push_back(stats_from(sys, trip, k));
    out.record.x_star = trip.right_vector;
    out.record.underdetermined = trip.underdetermined;
    out.record.nullspace_dim = trip.nullspace_dim;
    return out;
}

ModeSolve solve_mode_vector(const PartialTensor& tensor,
                            std::span<const std::vector<double>> other_factors, std::size_t k) {
    const std::size_t m = tensor.order();
    if (k < 1 || k > m) throw std::invalid_argument("mode out of range");
    if (other_factors.size() + 1 != m)
        throw std::invalid_argument("expected " + std::to_string(m - 1) + " factors");
    for (std::size_t t = 0, s = 0; t < m; ++t) {
        if (t == k - 1) continue;
        if (other_factors[s].size() != tensor.dims()[t])
            throw std::invalid_argument("factor for mode " + std::to_string(t + 1) +
                                        " has the wrong length");
        ++s;
    }

    const std::size_t n = tensor.dims()[k - 1];
    std::vector<double> wa(n, 0.0), ww(n, 0.0);
    std::vector<bool> touched(n, false);
    for (const auto& e : tensor.entries()) {
        double w = 1.0;
        for (std::size_t t = 0, s = 0; t < m; ++t) {
            if (t == k - 1) continue;
            w *= other_factors[s++][e.index[t] - 1];
        }
        const std::size_t j = e.index[k - 1] - 1;
        wa[j] += w * e.value;
        ww[j] += w * w;
        touched[j] = true;
    }
    ModeSolve out;
    out.u.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (touched[j] && ww[j] > 0.0)
            out.u[j] = wa[j] / ww[j];
        else
            out.unconstrained.push_back(j + 1);
    }
    return out;
}

CompletionResult complete(const PartialTensor& tensor, const CompletionOptions& options) {
    if (tensor.empty()) throw std::invalid_argument("cannot complete a tensor with no observations");
    const std::size_t m = tensor.order();

    CompletionResult result;
    std::vector<std::size_t> modes(m);
    std::iota(modes.begin(), modes.end(), 1);
    std::vector<std::size_t> local_choice;
    auto degrade = [&](std::string msg) {
        if (result.status == CompletionStatus::Ok) result.status = CompletionStatus::Degraded;
        result.diagnostics.push_back(std::move(msg));
    };

    const PartialTensor* current = &tensor;
    try {
        for (std::size_t level = 0; level + 1 < m; ++level) {
            LevelRecord rec;
            rec.level = level;
            FlattenedView view;
            std::size_t k = 0;
            if (level < options.forced_modes.size()) {
                auto it = std::find(modes.begin(), modes.end(), options.forced_modes[level]);
                if (it == modes.end())
                    throw std::invalid_argument("forced mode " +
                                                std::to_string(options.forced_modes[level]) +
                                                " is not available at level " +
                                                std::to_string(level));
                k = static_cast<std::size_t>(it - modes.begin()) + 1;
                Extraction ex = extract_vector(*current, k, options);
                rec.candidates = std::move(ex.record.candidates);
                rec.candidates.front().mode = modes[k - 1];
                rec.x_star = std::move(ex.x_star);
                rec.underdetermined = ex.record.underdetermined;
                rec.nullspace_dim = ex.record.nullspace_dim;
                view = std::move(ex.view);
            } else {
                ModeSelection sel = select_mode(*current, {}, options, modes);
                k = sel.mode;
                rec.candidates = std::move(sel.stats);
                rec.x_star = std::move(sel.triplet.right_vector);
                rec.underdetermined = sel.triplet.underdetermined;
                rec.nullspace_dim = sel.triplet.nullspace_dim;
                view = std::move(sel.view);
            }
            rec.chosen_mode = modes[k - 1];
            if (rec.nullspace_dim > 1)
                degrade("level " + std::to_string(level) + ": mode " +
                        std::to_string(rec.chosen_mode) + " has a " +
                        std::to_string(rec.nullspace_dim) + "-dimensional nullspace");
            result.chain.push_back(reshape_solution(as_span(rec.x_star), view));
            result.levels.push_back(std::move(rec));
            local_choice.push_back(k);
            modes.erase(modes.begin() + static_cast<std::ptrdiff_t>(k - 1));
            current = &result.chain.back();
        }
    } catch (const NumericalError& err) {
        result.status = CompletionStatus::Failed;
        result.diagnostics.push_back(std::string("numerical failure: ") + err.what());
        result.fit_residual = std::numeric_limits<double>::quiet_NaN();
        return result;
    }

    // bottom of the chain: an order-1 tensor over the one remaining mode
    const PartialTensor& bottom = result.chain.empty() ? tensor : result.chain.back();
    std::vector<double> last(bottom.dims()[0], options.fill_value);
    std::vector<bool> seen(last.size(), false);
    for (const auto& e : bottom.entries()) {
        last[e.index[0] - 1] = e.value;
        seen[e.index[0] - 1] = true;
    }
    const auto unseen = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), false));
    if (unseen > 0)
        degrade("mode " + std::to_string(modes.front()) + ": " + std::to_string(unseen) +
                " coordinates unobserved, filled with " + std::to_string(options.fill_value));

    std::vector<std::vector<double>> factors{std::move(last)};
    for (std::size_t level = local_choice.size(); level-- > 0;) {
        const PartialTensor& level_tensor = level == 0 ? tensor : result.chain[level - 1];
        const std::size_t k = local_choice[level];
        ModeSolve solved = solve_mode_vector(level_tensor, factors, k);
        if (!solved.unconstrained.empty())
            degrade("mode " + std::to_string(result.levels[level].chosen_mode) + ": " +
                    std::to_string(solved.unconstrained.size()) +
                    " coordinates unconstrained, set to 0");
        factors.insert(factors.begin() + static_cast<std::ptrdiff_t>(k - 1), std::move(solved.u));
    }
    result.u = std::move(factors);
    result.fit_residual = residual_on_omega(tensor, result.u);
    return result;
}

}  // namespace r1c
