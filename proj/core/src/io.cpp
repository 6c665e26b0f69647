#include "qts/io.hpp"

#include <fstream>

#include "qts/errors.hpp"

namespace qts::io {
namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw ParseError(context + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& context) {
    if (!j.is_object() || !j.contains(key)) fail(context, std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<std::size_t> modes_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) fail(context, "mode list must be a nonempty array");
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
            fail(context, "mode extents must be positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

} // namespace

json tensor_to_json(const QTensor& t) {
    json j;
    j["row_modes"] = t.shape().row_modes;
    j["col_modes"] = t.shape().col_modes;
    json data = json::array();
    for (const auto& q : t.data()) data.push_back(json::array({q.w, q.x, q.y, q.z}));
    j["data"] = std::move(data);
    return j;
}

QTensor tensor_from_json(const json& j, const std::string& context) {
    const auto rm = modes_from_json(field(j, "row_modes", context), context + ".row_modes");
    const auto cm = modes_from_json(field(j, "col_modes", context), context + ".col_modes");
    TensorShape shape(rm, cm);
    const json& data = field(j, "data", context);
    if (!data.is_array() || data.size() != shape.flat_rows() * shape.flat_cols()) {
        fail(context, "data must be an array of " +
                          std::to_string(shape.flat_rows() * shape.flat_cols()) +
                          " quaternion 4-arrays");
    }
    std::vector<Quaternion> q;
    q.reserve(data.size());
    for (const auto& entry : data) {
        if (!entry.is_array() || entry.size() != 4 || !entry[0].is_number()) {
            fail(context, "each entry must be a [w,x,y,z] array of numbers");
        }
        q.push_back({entry[0].get<double>(), entry[1].get<double>(), entry[2].get<double>(),
                     entry[3].get<double>()});
    }
    return QTensor(std::move(shape), std::move(q));
}

json instance_to_json(const Instance& inst) {
    json j;
    j["kind"] = to_string(inst.kind);
    j["seed"] = inst.seed;
    json coeffs = json::object();
    for (const auto& [name, t] : inst.coefficients) coeffs[name] = tensor_to_json(t);
    j["coefficients"] = std::move(coeffs);
    json rhs = json::array();
    for (const auto& t : inst.rhs) rhs.push_back(tensor_to_json(t));
    j["rhs"] = std::move(rhs);
    if (!inst.witness.empty()) {
        json w = json::object();
        for (const auto& [name, t] : inst.witness) w[name] = tensor_to_json(t);
        j["witness"] = std::move(w);
    }
    return j;
}

Instance instance_from_json(const json& j) {
    const std::string context = "instance";
    Instance inst;
    inst.kind = system_kind_from_string(field(j, "kind", context).get<std::string>());
    if (j.contains("seed")) inst.seed = j.at("seed").get<std::uint64_t>();
    const json& coeffs = field(j, "coefficients", context);
    for (const std::string& name : coefficient_names(inst.kind)) {
        if (!coeffs.contains(name)) fail(context, "missing coefficient '" + name + "'");
        inst.coefficients.emplace(name,
                                  tensor_from_json(coeffs.at(name), "coefficients." + name));
    }
    const json& rhs = field(j, "rhs", context);
    if (!rhs.is_array() || rhs.size() != inst.equation_count()) {
        fail(context, "rhs must be an array of " + std::to_string(inst.equation_count()) +
                          " tensors");
    }
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        inst.rhs.push_back(tensor_from_json(rhs[i], "rhs[" + std::to_string(i) + "]"));
    }
    if (j.contains("witness")) {
        for (const auto& [name, tj] : j.at("witness").items()) {
            inst.witness.emplace(name, tensor_from_json(tj, "witness." + name));
        }
    }
    return inst;
}

json solution_to_json(SystemKind kind, const std::map<std::string, QTensor>& unknowns) {
    json j;
    j["kind"] = to_string(kind);
    json u = json::object();
    for (const auto& [name, t] : unknowns) u[name] = tensor_to_json(t);
    j["unknowns"] = std::move(u);
    return j;
}

std::pair<SystemKind, std::map<std::string, QTensor>> solution_from_json(const json& j) {
    const std::string context = "solution";
    const SystemKind kind = system_kind_from_string(field(j, "kind", context).get<std::string>());
    std::map<std::string, QTensor> unknowns;
    const json& u = field(j, "unknowns", context);
    for (const std::string& name : unknown_names(kind)) {
        if (!u.contains(name)) fail(context, "missing unknown '" + name + "'");
        unknowns.emplace(name, tensor_from_json(u.at(name), "unknowns." + name));
    }
    return {kind, std::move(unknowns)};
}

json report_to_json(const RunReport& r) {
    json j;
    j["command"] = r.command;
    j["argv"] = r.argv;
    j["tolerances"] = {{"residual", r.tol_res}, {"rank", r.tol_rank}};
    j["verdict"] = r.verdict;
    json conds = json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"label", c.label}, {"residual", c.residual}});
    }
    j["conditions"] = std::move(conds);
    if (!r.equations.empty()) {
        json eqs = json::array();
        for (const auto& e : r.equations) {
            eqs.push_back({{"label", e.label}, {"absolute", e.absolute}, {"ratio", e.ratio}});
        }
        j["equations"] = std::move(eqs);
    }
    if (!r.penrose.empty()) j["penrose"] = r.penrose;
    j["outputs"] = r.outputs;
    if (r.duration_ms.has_value()) j["duration_ms"] = *r.duration_ms;
    return j;
}

RunReport report_from_json(const json& j) {
    const std::string context = "report";
    RunReport r;
    r.command = field(j, "command", context).get<std::string>();
    r.argv = field(j, "argv", context).get<std::vector<std::string>>();
    const json& tol = field(j, "tolerances", context);
    r.tol_res = field(tol, "residual", context + ".tolerances").get<double>();
    r.tol_rank = field(tol, "rank", context + ".tolerances").get<double>();
    r.verdict = field(j, "verdict", context).get<std::string>();
    for (const auto& c : field(j, "conditions", context)) {
        r.conditions.push_back({c.at("label").get<std::string>(), c.at("residual").get<double>()});
    }
    if (j.contains("equations")) {
        for (const auto& e : j.at("equations")) {
            r.equations.push_back({e.at("label").get<std::string>(),
                                   e.at("absolute").get<double>(), e.at("ratio").get<double>()});
        }
    }
    if (j.contains("penrose")) r.penrose = j.at("penrose").get<std::vector<double>>();
    r.outputs = field(j, "outputs", context).get<std::vector<std::string>>();
    if (j.contains("duration_ms")) r.duration_ms = j.at("duration_ms").get<double>();
    return r;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

QTensor load_tensor(const std::filesystem::path& path) {
    return tensor_from_json(load_json(path), path.string());
}

void save_tensor(const std::filesystem::path& path, const QTensor& t) {
    save_json(path, tensor_to_json(t));
}

Instance load_instance(const std::filesystem::path& path) {
    try {
        return instance_from_json(load_json(path));
    } catch (const json::exception& e) {
        throw ParseError("'" + path.string() + "': " + e.what());
    }
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
    save_json(path, instance_to_json(inst));
}

} // namespace qts::io
