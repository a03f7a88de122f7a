#include "r1c/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace r1c {

namespace {

std::size_t positive_integer(const Json& v, const std::string& what) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() >= 1) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 1) return v.get<std::size_t>();
    throw InputError(what + " must be a positive integer");
}

Json vector_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json optional_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

PartialTensor tensor_from_json(const Json& doc) {
    if (!doc.is_object()) throw InputError("tensor document must be an object");
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty())
        throw InputError("\"dims\" must be a nonempty array");
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw InputError("\"entries\" must be an array");
    if (doc["entries"].empty()) throw InputError("\"entries\" is empty");

    Dims dims;
    for (const auto& d : doc["dims"]) dims.push_back(positive_integer(d, "dimension"));

    std::vector<Entry> entries;
    entries.reserve(doc["entries"].size());
    std::size_t pos = 0;
    for (const auto& e : doc["entries"]) {
        const std::string where = "entry " + std::to_string(pos++);
        if (!e.is_object() || !e.contains("idx") || !e.contains("val"))
            throw InputError(where + " needs \"idx\" and \"val\"");
        const auto& idx = e["idx"];
        if (!idx.is_array() || idx.size() != dims.size())
            throw InputError(where + ": \"idx\" must have " + std::to_string(dims.size()) +
                             " coordinates");
        std::vector<std::size_t> coords;
        for (const auto& c : idx) coords.push_back(positive_integer(c, where + " coordinate"));
        if (!e["val"].is_number()) throw InputError(where + ": \"val\" must be a number");
        entries.push_back({MultiIndex(std::move(coords)), e["val"].get<double>()});
    }
    try {
        return PartialTensor(std::move(dims), std::move(entries));
    } catch (const std::invalid_argument& err) {
        throw InputError(err.what());
    }
}

Json tensor_to_json(const PartialTensor& tensor) {
    Json doc;
    doc["dims"] = tensor.dims();
    Json entries = Json::array();
    for (const auto& e : tensor.entries()) entries.push_back({{"idx", e.index.coords()}, {"val", e.value}});
    doc["entries"] = std::move(entries);
    return doc;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw InputError(path.string() + ": " + err.what());
    }
}

PartialTensor read_tensor_file(const std::filesystem::path& path) {
    return tensor_from_json(read_json_file(path));
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

std::vector<std::vector<double>> factors_from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("factors") || !doc["factors"].is_array())
        throw InputError("factor document needs a \"factors\" array");
    std::vector<std::vector<double>> out;
    for (const auto& f : doc["factors"]) {
        if (!f.is_array()) throw InputError("each factor must be an array");
        std::vector<double> v;
        for (const auto& x : f) {
            if (!x.is_number()) throw InputError("factor entries must be numbers");
            v.push_back(x.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

Json factors_to_json(const std::vector<std::vector<double>>& factors) {
    Json arr = Json::array();
    for (const auto& f : factors) arr.push_back(vector_json(f));
    return Json{{"factors", std::move(arr)}};
}

Json to_json(const CompletionResult& result, bool include_chain) {
    Json doc;
    doc["status"] = to_string(result.status);
    doc["fit_residual"] = optional_number(result.fit_residual);
    Json u = Json::array();
    for (const auto& f : result.u) u.push_back(vector_json(f));
    doc["u"] = std::move(u);
    Json levels = Json::array();
    for (const auto& lv : result.levels) {
        Json l;
        l["level"] = lv.level;
        l["chosen_mode"] = lv.chosen_mode;
        l["underdetermined"] = lv.underdetermined;
        l["nullspace_dim"] = lv.nullspace_dim;
        Json cands = Json::array();
        for (const auto& c : lv.candidates) {
            Json s;
            s["mode"] = c.mode;
            s["failed"] = c.failed;
            s["sigma_min"] = c.sigma_min;
            s["gap"] = c.gap;
            s["underdetermined"] = c.underdetermined;
            s["nullspace_dim"] = c.nullspace_dim;
            s["nrows"] = c.nrows;
            s["ncols"] = c.ncols;
            cands.push_back(std::move(s));
        }
        l["candidates"] = std::move(cands);
        l["x_star"] = vector_json(lv.x_star);
        levels.push_back(std::move(l));
    }
    doc["levels"] = std::move(levels);
    if (include_chain) {
        Json chain = Json::array();
        for (const auto& t : result.chain) chain.push_back(tensor_to_json(t));
        doc["chain"] = std::move(chain);
    }
    doc["diagnostics"] = result.diagnostics;
    return doc;
}

Json to_json(const AnalysisReport& report) {
    Json doc;
    doc["determinable"] = report.determinable;
    if (report.witness_chain) {
        Json chain = Json::array();
        for (const auto& s : *report.witness_chain)
            chain.push_back({{"mode", s.mode}, {"nullspace_dim", s.nullspace_dim}});
        doc["witness_chain"] = std::move(chain);
    } else {
        doc["witness_chain"] = nullptr;
    }
    Json modes = Json::array();
    for (const auto& [k, d] : report.extractable_per_mode) {
        Json m;
        m["mode"] = k;
        m["extractable"] = d.extractable;
        m["nullspace_dim"] = d.nullspace_dim;
        m["sigma_min"] = d.sigma_min;
        m["sigma_next"] = d.sigma_next ? Json(*d.sigma_next) : Json(nullptr);
        m["gap"] = d.gap;
        m["underdetermined"] = d.underdetermined;
        m["nrows"] = d.nrows;
        m["ncols"] = d.ncols;
        m["connected"] = report.connected_per_mode.at(k);
        m["mod_full"] = report.mod_full.at(k);
        modes.push_back(std::move(m));
    }
    doc["modes"] = std::move(modes);
    doc["connected"] = report.connected;
    doc["nonzero_entries"] = report.nonzero_entries;
    doc["violated_hypotheses"] = report.violated_hypotheses;
    return doc;
}

Json to_json(const Metrics& metrics) {
    Json doc;
    doc["err_ab"] = optional_number(metrics.err_ab);
    doc["err_rt"] = optional_number(metrics.err_rt);
    doc["sin_theta"] = optional_number(metrics.sin_theta);
    doc["sin_per_mode"] = metrics.sin_per_mode;
    doc["density"] = metrics.density;
    doc["runtime_seconds"] = metrics.runtime_seconds;
    return doc;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace r1c
