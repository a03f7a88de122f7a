#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "r1c/analysis.hpp"
#include "r1c/bench.hpp"
#include "r1c/completion.hpp"
#include "r1c/generator.hpp"
#include "r1c/io.hpp"
#include "r1c/metrics.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInputError = 2;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
    return out;
}

r1c::Dims parse_dims(const std::string& s) {
    r1c::Dims dims;
    for (const auto& p : split(s, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() || v < 1) throw r1c::InputError("bad dimension '" + p + "'");
        dims.push_back(static_cast<std::size_t>(v));
    }
    if (dims.empty()) throw r1c::InputError("--dims is empty");
    return dims;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != p.size() || !(v >= 0.0)) throw r1c::InputError("bad value '" + p + "'");
        out.push_back(v);
    }
    if (out.empty()) throw r1c::InputError("empty list");
    return out;
}

void emit(const r1c::Json& doc, const std::string& output) {
    if (output.empty() || output == "-")
        std::cout << doc.dump(2) << '\n';
    else
        r1c::write_json_file(output, doc);
}

r1c::SvdOptions svd_options(double tol) {
    r1c::SvdOptions o;
    o.tol = tol;
    return o;
}

int cmd_analyze(const std::string& input, double tol) {
    const r1c::PartialTensor a = r1c::read_tensor_file(input);
    if (a.order() < 2) throw r1c::InputError("analysis needs a tensor of order >= 2");
    const r1c::AnalysisReport report = r1c::is_determinable(a, svd_options(tol));
    std::cerr << "r1c analyze: " << (report.determinable ? "determinable" : "not determinable")
              << '\n';
    emit(r1c::to_json(report), "");
    return kOk;
}

int cmd_complete(const std::string& input, double tol, const std::string& output,
                 const std::string& truth_path, bool no_chain, const std::string& modes,
                 r1c::ModeRule rule) {
    const r1c::PartialTensor a = r1c::read_tensor_file(input);
    std::optional<std::vector<std::vector<double>>> truth;
    if (!truth_path.empty()) truth = r1c::factors_from_json(r1c::read_json_file(truth_path));

    r1c::CompletionOptions opts;
    opts.svd = svd_options(tol);
    if (!modes.empty()) opts.forced_modes = parse_dims(modes);
    opts.rule = rule;
    const r1c::CompletionResult res = r1c::complete(a, opts);
    for (const auto& d : res.diagnostics) std::cerr << "r1c complete: " << d << '\n';
    std::cerr << "r1c complete: status " << r1c::to_string(res.status) << ", residual "
              << res.fit_residual << '\n';

    r1c::Json doc = r1c::to_json(res, !no_chain);
    if (truth && res.status != r1c::CompletionStatus::Failed) {
        try {
            const r1c::PartialTensor exact = r1c::outer_on_pattern(a, *truth);
            double noise = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a.entries()[i].value - exact.entries()[i].value;
                noise += d * d;
            }
            doc["metrics"] = r1c::to_json(r1c::completion_errors(*truth, res.u, std::sqrt(noise), a));
        } catch (const std::invalid_argument& err) {
            throw r1c::InputError(std::string("truth factors: ") + err.what());
        }
    }
    emit(doc, output);
    return res.status == r1c::CompletionStatus::Failed ? kFailed : kOk;
}

int cmd_generate(const std::string& dims_s, std::uint64_t seed, double eps, const std::string& prefix) {
    const r1c::Instance inst = r1c::make_instance({parse_dims(dims_s), seed, eps});
    if (prefix.empty()) {
        r1c::Json doc;
        doc["exact"] = r1c::tensor_to_json(inst.exact);
        doc["noisy"] = r1c::tensor_to_json(inst.noisy);
        doc["factors"] = r1c::factors_to_json(inst.truth.factors)["factors"];
        emit(doc, "");
    } else {
        r1c::write_json_file(prefix + "_exact.json", r1c::tensor_to_json(inst.exact));
        r1c::write_json_file(prefix + "_noisy.json", r1c::tensor_to_json(inst.noisy));
        r1c::write_json_file(prefix + "_factors.json", r1c::factors_to_json(inst.truth.factors));
    }
    std::cerr << "r1c generate: " << inst.exact.size() << " observed entries, ||dA|| = "
              << inst.noise_norm << '\n';
    return kOk;
}

int cmd_bench(const std::string& dims_s, const std::string& eps_s, std::size_t trials,
              std::uint64_t seed, bool compare_nls, const std::string& format,
              const std::string& output, double tol, r1c::ModeRule rule) {
    r1c::BenchConfig cfg;
    cfg.dims = parse_dims(dims_s);
    cfg.eps = parse_doubles(eps_s);
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.compare_nls = compare_nls;
    cfg.completion.svd = svd_options(tol);
    cfg.completion.rule = rule;
    if (trials == 0) throw r1c::InputError("--trials must be positive");
    std::cerr << "r1c bench: " << trials << " trials x " << cfg.eps.size() << " noise levels on "
              << r1c::default_threads() << " threads\n";

    const r1c::BenchReport report = r1c::run_bench(cfg);
    for (const auto& s : report.means)
        std::cerr << "r1c bench: eps " << s.eps << " mean err_rt " << s.err_rt << " sin_theta "
                  << s.sin_theta << " time " << s.time << "s\n";

    std::string text = format == "json" ? r1c::to_json(report).dump(2) + "\n" : r1c::to_csv(report);
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(output);
        if (!out) throw std::runtime_error("cannot write " + output);
        out << text;
    }
    bool any_failed = false;
    for (const auto& s : report.means) any_failed = any_failed || s.failed > 0;
    return any_failed ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-one tensor completion by recursive flattening"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "r1c 1.0.0");

    double tol = -1.0;
    std::string input, output, truth, dims, modes, eps_list = "1e-2", format = "csv";
    std::uint64_t seed = 0;
    double eps = 0.0;
    std::size_t trials = 1;
    bool compare_nls = false, no_chain = false;
    r1c::ModeRule rule = r1c::ModeRule::MaxGap;
    const std::map<std::string, r1c::ModeRule> rules{{"max-gap", r1c::ModeRule::MaxGap},
                                                      {"min-sigma", r1c::ModeRule::MinSigma}};

    auto* analyze = app.add_subcommand("analyze", "Extractability, connectivity and determinability report");
    analyze->add_option("input", input, "Tensor JSON file")->required();
    analyze->add_option("--tol", tol, "Relative rank tolerance (default max(l,n)*eps)");

    auto* complete = app.add_subcommand("complete", "Complete a partially observed tensor");
    complete->add_option("input", input, "Tensor JSON file")->required();
    complete->add_option("--tol", tol, "Relative rank tolerance");
    complete->add_option("-o,--output", output, "Write the result here instead of stdout");
    complete->add_option("--truth", truth, "Factor JSON to report errors against");
    complete->add_flag("--no-chain", no_chain, "Omit the recursion chain tensors");
    complete->add_option("--modes", modes, "Comma separated modes to use level by level");
    complete->add_option("--rule", rule, "Mode selection rule")
        ->transform(CLI::CheckedTransformer(rules, CLI::ignore_case))
        ->option_text("max-gap|min-sigma");

    auto* generate = app.add_subcommand("generate", "Random determinable instance");
    generate->add_option("--dims", dims, "Comma separated mode sizes")->required();
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--eps", eps, "Noise magnitude")->check(CLI::NonNegativeNumber);
    generate->add_option("-o,--output", output,
                         "File prefix: writes <prefix>_exact.json, _noisy.json, _factors.json");

    auto* bench = app.add_subcommand("bench", "Seeded noisy-completion experiment");
    bench->add_option("--dims", dims, "Comma separated mode sizes")->required();
    bench->add_option("--eps", eps_list, "Comma separated noise magnitudes");
    bench->add_option("--trials", trials, "Trials per noise level");
    bench->add_option("--seed", seed, "Base seed");
    bench->add_flag("--compare-nls", compare_nls, "Also run the nonlinear least squares baseline");
    bench->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    bench->add_option("-o,--output", output, "Write the report here instead of stdout");
    bench->add_option("--tol", tol, "Relative rank tolerance");
    bench->add_option("--rule", rule, "Mode selection rule")
        ->transform(CLI::CheckedTransformer(rules, CLI::ignore_case))
        ->option_text("max-gap|min-sigma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*analyze) return cmd_analyze(input, tol);
        if (*complete) return cmd_complete(input, tol, output, truth, no_chain, modes, rule);
        if (*generate) return cmd_generate(dims, seed, eps, output);
        if (*bench) return cmd_bench(dims, eps_list, trials, seed, compare_nls, format, output, tol, rule);
    } catch (const r1c::InputError& e) {
        std::cerr << "r1c: input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "r1c: input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "r1c: " << e.what() << '\n';
        return kFailed;
    }
    return kOk;
}
