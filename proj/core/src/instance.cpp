#include "qts/instance.hpp"

#include <algorithm>

#include "qts/errors.hpp"

namespace qts {

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::axb: return "axb";
        case SystemKind::two_term: return "two_term";
        case SystemKind::mixed: return "mixed";
        case SystemKind::triple: return "triple";
        case SystemKind::chain: return "chain";
    }
    return "?";
}

SystemKind system_kind_from_string(const std::string& s) {
    if (s == "axb") return SystemKind::axb;
    if (s == "two_term") return SystemKind::two_term;
    if (s == "mixed") return SystemKind::mixed;
    if (s == "triple") return SystemKind::triple;
    if (s == "chain") return SystemKind::chain;
    throw ParseError("unknown system kind '" + s + "' (expected axb|two_term|mixed|triple|chain)");
}

std::size_t Instance::equation_count() const {
    switch (kind) {
        case SystemKind::triple: return 3;
        case SystemKind::chain: return 4;
        default: return 1;
    }
}

const QTensor& Instance::coeff(const std::string& name) const {
    auto it = coefficients.find(name);
    if (it == coefficients.end()) {
        throw ParseError("instance is missing coefficient '" + name + "'");
    }
    return it->second;
}

std::vector<std::string> unknown_names(SystemKind kind) {
    switch (kind) {
        case SystemKind::axb: return {"X"};
        case SystemKind::two_term: return {"X", "Y"};
        case SystemKind::mixed: return {"X", "Y", "Z1", "Z2"};
        case SystemKind::triple:
            return {"X1", "Y1", "X2", "Y2", "X3", "Y3", "Z1", "Z2", "Z3", "Z4"};
        case SystemKind::chain: return {"Z1", "Z2", "Z3", "Z4", "Z5"};
    }
    return {};
}

std::vector<std::string> coefficient_names(SystemKind kind) {
    switch (kind) {
        case SystemKind::axb: return {"A", "B"};
        case SystemKind::two_term: return {"A", "B", "C", "D"};
        case SystemKind::mixed: return {"A", "B", "C", "D", "F", "G"};
        case SystemKind::triple: {
            std::vector<std::string> out;
            for (int i = 1; i <= 3; ++i)
                for (const char* base : {"A", "B", "C", "D", "F", "G"})
                    out.push_back(base + std::to_string(i));
            return out;
        }
        case SystemKind::chain: {
            std::vector<std::string> out;
            for (int k = 1; k <= 4; ++k)
                for (const char* base : {"A", "B", "C", "D"})
                    out.push_back(base + std::to_string(k));
            return out;
        }
    }
    return {};
}

namespace {

const QTensor& pick(const std::map<std::string, QTensor>& m, const std::string& name) {
    auto it = m.find(name);
    if (it == m.end()) throw ShapeMismatch("missing unknown '" + name + "'");
    return it->second;
}

} // namespace

std::vector<QTensor> eval_lhs(const Instance& inst,
                              const std::map<std::string, QTensor>& unknowns) {
    auto ein = einstein_product;
    switch (inst.kind) {
        case SystemKind::axb:
            return {ein(ein(inst.coeff("A"), pick(unknowns, "X")), inst.coeff("B"))};
        case SystemKind::two_term:
            return {ein(ein(inst.coeff("A"), pick(unknowns, "X")), inst.coeff("B")) +
                    ein(ein(inst.coeff("C"), pick(unknowns, "Y")), inst.coeff("D"))};
        case SystemKind::mixed:
            return {ein(inst.coeff("A"), pick(unknowns, "X")) +
                    ein(pick(unknowns, "Y"), inst.coeff("B")) +
                    ein(ein(inst.coeff("C"), pick(unknowns, "Z1")), inst.coeff("D")) +
                    ein(ein(inst.coeff("F"), pick(unknowns, "Z2")), inst.coeff("G"))};
        case SystemKind::triple: {
            std::vector<QTensor> out;
            for (int i = 1; i <= 3; ++i) {
                const std::string n = std::to_string(i);
                out.push_back(ein(inst.coeff("A" + n), pick(unknowns, "X" + n)) +
                              ein(pick(unknowns, "Y" + n), inst.coeff("B" + n)) +
                              ein(ein(inst.coeff("C" + n), pick(unknowns, "Z" + n)),
                                  inst.coeff("D" + n)) +
                              ein(ein(inst.coeff("F" + n), pick(unknowns, "Z" + std::to_string(i + 1))),
                                  inst.coeff("G" + n)));
            }
            return out;
        }
        case SystemKind::chain: {
            std::vector<QTensor> out;
            for (int k = 1; k <= 4; ++k) {
                const std::string n = std::to_string(k);
                out.push_back(ein(ein(inst.coeff("A" + n), pick(unknowns, "Z" + n)),
                                  inst.coeff("B" + n)) +
                              ein(ein(inst.coeff("C" + n), pick(unknowns, "Z" + std::to_string(k + 1))),
                                  inst.coeff("D" + n)));
            }
            return out;
        }
    }
    return {};
}

SolveOutcome solve_instance(const Instance& inst, const SolveOptions& opts) {
    if (inst.rhs.size() != inst.equation_count()) {
        throw ShapeMismatch("instance has " + std::to_string(inst.rhs.size()) +
                            " right-hand sides, expected " +
                            std::to_string(inst.equation_count()));
    }
    switch (inst.kind) {
        case SystemKind::axb:
            return solve_axb(inst.coeff("A"), inst.coeff("B"), inst.rhs[0], opts);
        case SystemKind::two_term:
            return solve_two_term(inst.coeff("A"), inst.coeff("B"), inst.coeff("C"),
                                  inst.coeff("D"), inst.rhs[0], opts);
        case SystemKind::mixed:
            return solve_mixed(inst.coeff("A"), inst.coeff("B"), inst.coeff("C"), inst.coeff("D"),
                               inst.coeff("F"), inst.coeff("G"), inst.rhs[0], opts);
        case SystemKind::triple: {
            std::array<MixedEquation, 3> eqs;
            for (int i = 0; i < 3; ++i) {
                const std::string n = std::to_string(i + 1);
                eqs[i] = {inst.coeff("A" + n), inst.coeff("B" + n), inst.coeff("C" + n),
                          inst.coeff("D" + n), inst.coeff("F" + n), inst.coeff("G" + n),
                          inst.rhs[static_cast<std::size_t>(i)]};
            }
            return solve_triple_system(eqs, opts);
        }
        case SystemKind::chain: {
            std::array<ChainEquation, 4> eqs;
            for (int k = 0; k < 4; ++k) {
                const std::string n = std::to_string(k + 1);
                eqs[k] = {inst.coeff("A" + n), inst.coeff("B" + n), inst.coeff("C" + n),
                          inst.coeff("D" + n), inst.rhs[static_cast<std::size_t>(k)]};
            }
            return solve_chain_system(eqs, opts);
        }
    }
    throw Error("solve_instance: unreachable");
}

double ResidualReport::max_ratio() const {
    double m = 0.0;
    for (const auto& e : equations) m = std::max(m, e.ratio);
    return m;
}

ResidualReport verify_solution(const Instance& inst,
                               const std::map<std::string, QTensor>& unknowns) {
    const std::vector<QTensor> lhs = eval_lhs(inst, unknowns);
    if (lhs.size() != inst.rhs.size()) {
        throw ShapeMismatch("verify_solution: equation count mismatch");
    }
    ResidualReport rep;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double abs = (lhs[i] - inst.rhs[i]).frobenius_norm();
        const double scale = 1.0 + inst.rhs[i].frobenius_norm();
        rep.equations.push_back(
            {"eq" + std::to_string(i + 1), abs, abs / scale});
    }
    return rep;
}

} // namespace qts
