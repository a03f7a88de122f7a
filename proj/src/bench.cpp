#include "r1c/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "r1c/generator.hpp"

namespace r1c {

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1));
}

std::size_t default_threads() {
    if (const char* env = std::getenv("R1C_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Metrics failed_metrics(const PartialTensor& omega, double runtime) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    Metrics m;
    m.err_ab = m.err_rt = m.sin_theta = nan;
    m.density = static_cast<double>(omega.size()) / omega.full_size();
    m.runtime_seconds = runtime;
    return m;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            s += x;
            ++n;
        }
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

TrialRow run_trial(const BenchConfig& config, std::size_t trial, double eps) {
    TrialRow row;
    row.trial = trial;
    row.seed = trial_seed(config.seed, trial);
    row.eps = eps;
    const Instance inst = make_instance({config.dims, row.seed, eps});
    row.observed = inst.noisy.size();
    row.noise_norm = inst.noise_norm;

    auto start = Clock::now();
    const CompletionResult res = complete(inst.noisy, config.completion);
    const double alg_time = seconds_since(start);
    row.status = res.status;
    for (const auto& lv : res.levels) {
        row.modes.push_back(lv.chosen_mode);
        double sigma = 0.0, gap = 0.0;
        for (const auto& c : lv.candidates)
            if (c.mode == lv.chosen_mode) {
                sigma = c.sigma_min;
                gap = c.gap;
            }
        row.level_sigma.push_back(sigma);
        row.level_gap.push_back(gap);
    }
    if (res.status == CompletionStatus::Failed)
        row.alg = failed_metrics(inst.noisy, alg_time);
    else
        row.alg = completion_errors(inst.truth.factors, res.u, inst.noise_norm, inst.noisy, alg_time);

    if (config.compare_nls) {
        NlsOptions opts = config.nls;
        opts.seed = splitmix64(row.seed ^ 0x6e6c73);
        start = Clock::now();
        const NlsResult fit = nls_fit(inst.noisy, opts);
        const double nls_time = seconds_since(start);
        try {
            row.nls = completion_errors(inst.truth.factors, fit.factors, inst.noise_norm, inst.noisy,
                                        nls_time);
        } catch (const std::invalid_argument&) {
            row.nls = failed_metrics(inst.noisy, nls_time);
        }
        row.nls_termination = fit.termination;
        row.nls_iterations = fit.iterations;
    }
    return row;
}

BenchReport run_bench(const BenchConfig& config) {
    BenchReport report;
    report.config = config;
    const std::size_t total = config.trials * config.eps.size();
    report.rows.resize(total);

    std::size_t workers = config.threads ? config.threads : default_threads();
    workers = std::max<std::size_t>(1, std::min(workers, total));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job; (job = next.fetch_add(1)) < total;) {
            const std::size_t e = job / config.trials;
            report.rows[job] = run_trial(config, job % config.trials, config.eps[e]);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t e = 0; e < config.eps.size(); ++e) {
        BenchSummary s;
        s.eps = config.eps[e];
        s.trials = config.trials;
        std::vector<double> den, ab, rt, st, tm, nab, nrt, nst, ntm;
        std::size_t better = 0, faster = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            const TrialRow& r = report.rows[e * config.trials + t];
            if (r.status == CompletionStatus::Failed) ++s.failed;
            den.push_back(r.alg.density);
            ab.push_back(r.alg.err_ab);
            rt.push_back(r.alg.err_rt);
            st.push_back(r.alg.sin_theta);
            tm.push_back(r.alg.runtime_seconds);
            if (r.nls) {
                nab.push_back(r.nls->err_ab);
                nrt.push_back(r.nls->err_rt);
                nst.push_back(r.nls->sin_theta);
                ntm.push_back(r.nls->runtime_seconds);
                // a NaN baseline error counts as a loss for the baseline
                if (!(r.nls->err_ab <= r.alg.err_ab)) ++better;
                if (r.alg.runtime_seconds < r.nls->runtime_seconds) ++faster;
            }
        }
        s.density = mean(den);
        s.err_ab = mean(ab);
        s.err_rt = mean(rt);
        s.sin_theta = mean(st);
        s.time = mean(tm);
        if (config.compare_nls) {
            s.nls_err_ab = mean(nab);
            s.nls_err_rt = mean(nrt);
            s.nls_sin_theta = mean(nst);
            s.nls_time = mean(ntm);
            const double n = static_cast<double>(config.trials);
            s.alg_more_accurate = static_cast<double>(better) / n;
            s.alg_faster = static_cast<double>(faster) / n;
        }
        report.means.push_back(s);
    }
    return report;
}

namespace {

std::string dims_label(const Dims& dims) {
    std::string s;
    for (std::size_t t = 0; t < dims.size(); ++t) s += (t ? "x" : "") + std::to_string(dims[t]);
    return s;
}

std::string joined(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
}

std::string joined(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

}  // namespace

std::string to_csv(const BenchReport& report) {
    std::ostringstream os;
    const bool nls = report.config.compare_nls;
    os << "kind,trial,seed,dims,eps,den,err_ab,err_rt,sin_theta,time,status,modes,sigma_min,gap";
    if (nls) os << ",nls_err_ab,nls_err_rt,nls_sin_theta,nls_time,nls_termination,nls_iterations";
    os << '\n';
    const std::string dims = dims_label(report.config.dims);
    for (const auto& r : report.rows) {
        os << "trial," << r.trial << ',' << r.seed << ',' << dims << ',' << format_double(r.eps) << ','
           << format_double(r.alg.density) << ',' << format_double(r.alg.err_ab) << ','
           << format_double(r.alg.err_rt) << ',' << format_double(r.alg.sin_theta) << ','
           << format_double(r.alg.runtime_seconds) << ',' << to_string(r.status) << ','
           << joined(r.modes) << ',' << joined(r.level_sigma) << ',' << joined(r.level_gap);
        if (nls) {
            os << ',' << format_double(r.nls->err_ab) << ',' << format_double(r.nls->err_rt) << ','
               << format_double(r.nls->sin_theta) << ',' << format_double(r.nls->runtime_seconds)
               << ',' << to_string(*r.nls_termination) << ',' << r.nls_iterations;
        }
        os << '\n';
    }
    for (const auto& s : report.means) {
        os << "mean," << s.trials << ",," << dims << ',' << format_double(s.eps) << ','
           << format_double(s.density) << ',' << format_double(s.err_ab) << ','
           << format_double(s.err_rt) << ',' << format_double(s.sin_theta) << ','
           << format_double(s.time) << ",failed=" << s.failed << ",,,";
        if (nls)
            os << ',' << opt(s.nls_err_ab) << ',' << opt(s.nls_err_rt) << ',' << opt(s.nls_sin_theta)
               << ',' << opt(s.nls_time) << ",,";
        os << '\n';
    }
    return os.str();
}

Json to_json(const BenchReport& report) {
    Json doc;
    doc["dims"] = report.config.dims;
    doc["trials"] = report.config.trials;
    doc["seed"] = report.config.seed;
    doc["compare_nls"] = report.config.compare_nls;
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        Json j;
        j["trial"] = r.trial;
        j["seed"] = r.seed;
        j["eps"] = r.eps;
        j["observed"] = r.observed;
        j["noise_norm"] = r.noise_norm;
        j["status"] = to_string(r.status);
        j["metrics"] = to_json(r.alg);
        j["modes"] = r.modes;
        j["sigma_min"] = r.level_sigma;
        j["gap"] = r.level_gap;
        if (r.nls) {
            j["nls"] = to_json(*r.nls);
            j["nls"]["termination"] = to_string(*r.nls_termination);
            j["nls"]["iterations"] = r.nls_iterations;
        }
        rows.push_back(std::move(j));
    }
    doc["rows"] = std::move(rows);
    Json means = Json::array();
    for (const auto& s : report.means) {
        Json j;
        j["eps"] = s.eps;
        j["trials"] = s.trials;
        j["failed"] = s.failed;
        j["den"] = s.density;
        j["err_ab"] = s.err_ab;
        j["err_rt"] = s.err_rt;
        j["sin_theta"] = s.sin_theta;
        j["time"] = s.time;
        if (s.nls_err_ab) {
            j["nls_err_ab"] = *s.nls_err_ab;
            j["nls_err_rt"] = *s.nls_err_rt;
            j["nls_sin_theta"] = *s.nls_sin_theta;
            j["nls_time"] = *s.nls_time;
            j["alg_more_accurate"] = *s.alg_more_accurate;
            j["alg_faster"] = *s.alg_faster;
        }
        means.push_back(std::move(j));
    }
    doc["means"] = std::move(means);
    return doc;
}

}  // namespace r1c
