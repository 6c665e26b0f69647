#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "qts/instance.hpp"

namespace qts::io {

using nlohmann::json;

// Tensor files: {"row_modes": [...], "col_modes": [...], "data": [[w,x,y,z], ...]}
// with data in canonical row-major order. nlohmann serializes doubles with
// shortest-round-trip precision, so files reload bit-exactly.
json tensor_to_json(const QTensor& t);
QTensor tensor_from_json(const json& j, const std::string& context);

// Instance bundles: {"kind", "coefficients": {...}, "rhs": [...],
//                    "witness": {...}?, "seed"}
json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

// Solution files: {"kind", "unknowns": {...}}
json solution_to_json(SystemKind kind, const std::map<std::string, QTensor>& unknowns);
std::pair<SystemKind, std::map<std::string, QTensor>> solution_from_json(const json& j);

/// Machine-readable result of one CLI run; round-trips through its own JSON.
struct RunReport {
    std::string command;
    std::vector<std::string> argv;
    double tol_res = 1e-8;
    double tol_rank = 1e-12;
    std::string verdict; // consistent | inconsistent | pass | fail
    std::vector<ConditionResidual> conditions;
    std::vector<EquationResidual> equations;
    std::vector<double> penrose;
    std::vector<std::string> outputs;
    std::optional<double> duration_ms; // present only when timing was requested
};
json report_to_json(const RunReport& r);
RunReport report_from_json(const json& j);

json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);

QTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const QTensor& t);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const Instance& inst);

} // namespace qts::io
