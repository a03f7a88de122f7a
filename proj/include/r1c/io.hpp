#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "r1c/analysis.hpp"
#include "r1c/completion.hpp"
#include "r1c/metrics.hpp"
#include "r1c/tensor.hpp"

namespace r1c {

using Json = nlohmann::ordered_json;

/// Malformed or invalid input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"dims": [...], "entries": [{"idx": [...], "val": x}, ...]}, 1-based.
/// An empty entries array is rejected.
PartialTensor tensor_from_json(const Json& doc);
Json tensor_to_json(const PartialTensor& tensor);

PartialTensor read_tensor_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

/// {"factors": [[...], ...]}
std::vector<std::vector<double>> factors_from_json(const Json& doc);
Json factors_to_json(const std::vector<std::vector<double>>& factors);

Json to_json(const CompletionResult& result, bool include_chain = true);
Json to_json(const AnalysisReport& report);
Json to_json(const Metrics& metrics);

/// 17 significant digits, for CSV cells.
std::string format_double(double x);

}  // namespace r1c
