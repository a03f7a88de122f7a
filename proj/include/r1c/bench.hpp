#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "r1c/baseline.hpp"
#include "r1c/completion.hpp"
#include "r1c/io.hpp"
#include "r1c/metrics.hpp"

namespace r1c {

struct BenchConfig {
    Dims dims;
    std::vector<double> eps{1e-2};
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool compare_nls = false;
    /// 0 means R1C_THREADS, else hardware concurrency.
    std::size_t threads = 0;
    CompletionOptions completion;
    NlsOptions nls;
};

struct TrialRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double eps = 0.0;
    std::size_t observed = 0;
    double noise_norm = 0.0;
    CompletionStatus status = CompletionStatus::Ok;
    Metrics alg;
    std::vector<std::size_t> modes;
    std::vector<double> level_sigma;
    std::vector<double> level_gap;
    std::optional<Metrics> nls;
    std::optional<NlsTermination> nls_termination;
    std::size_t nls_iterations = 0;
};

struct BenchSummary {
    double eps = 0.0;
    std::size_t trials = 0;
    std::size_t failed = 0;
    double density = 0.0;
    double err_ab = 0.0;
    double err_rt = 0.0;
    double sin_theta = 0.0;
    double time = 0.0;
    std::optional<double> nls_err_ab;
    std::optional<double> nls_err_rt;
    std::optional<double> nls_sin_theta;
    std::optional<double> nls_time;
    /// Fractions of trials where the algorithm beat the baseline.
    std::optional<double> alg_more_accurate;
    std::optional<double> alg_faster;
};

struct BenchReport {
    BenchConfig config;
    std::vector<TrialRow> rows;
    std::vector<BenchSummary> means;
};

/// Seed of trial t, independent of the worker that runs it.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Worker count from R1C_THREADS, falling back to the hardware.
std::size_t default_threads();

TrialRow run_trial(const BenchConfig& config, std::size_t trial, double eps);

/// Every eps value reuses the same trial seeds, so instances differ only in noise size.
BenchReport run_bench(const BenchConfig& config);

std::string to_csv(const BenchReport& report);
Json to_json(const BenchReport& report);

}  // namespace r1c
