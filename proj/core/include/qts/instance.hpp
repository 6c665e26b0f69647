#pragma once

#include <map>
#include <string>
#include <vector>

#include "qts/solvers.hpp"

namespace qts {

enum class SystemKind { axb, two_term, mixed, triple, chain };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& s);

/// One concrete system: coefficients, right-hand sides, and optionally the
/// witness unknowns a generator used to construct it.
struct Instance {
    SystemKind kind = SystemKind::axb;
    std::map<std::string, QTensor> coefficients;
    std::vector<QTensor> rhs;
    std::map<std::string, QTensor> witness; // empty when unknown
    std::uint64_t seed = 0;

    std::size_t equation_count() const;
    const QTensor& coeff(const std::string& name) const;
};

/// Ordered unknown names for each kind (axb: X; two_term: X,Y; mixed:
/// X,Y,Z1,Z2; triple: X1..Y3,Z1..Z4; chain: Z1..Z5).
std::vector<std::string> unknown_names(SystemKind kind);

/// Coefficient names for each kind.
std::vector<std::string> coefficient_names(SystemKind kind);

/// Evaluate the left-hand side of every equation for the given unknowns.
std::vector<QTensor> eval_lhs(const Instance& inst,
                              const std::map<std::string, QTensor>& unknowns);

/// Dispatch to the solver matching the instance kind.
SolveOutcome solve_instance(const Instance& inst, const SolveOptions& opts = {});

/// Per-equation residuals of a candidate solution.
struct EquationResidual {
    std::string label;
    double absolute = 0.0;
    double ratio = 0.0; // absolute / (1 + ||rhs||_F)
};
struct ResidualReport {
    std::vector<EquationResidual> equations;
    double max_ratio() const;
    bool within(double tol) const { return max_ratio() < tol; }
};
ResidualReport verify_solution(const Instance& inst,
                               const std::map<std::string, QTensor>& unknowns);

} // namespace qts
