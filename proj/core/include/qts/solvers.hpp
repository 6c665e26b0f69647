#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qts/general_solution.hpp"

namespace qts {

struct SolveOptions {
    double tol_res = 1e-8;   // consistency decision: residual <= tol_res * (1 + ||E||_F)
    double tol_rank = 1e-12; // numerical rank cutoff for every pseudoinverse
};

struct ConditionResidual {
    std::string label;
    double residual = 0.0;
};

/// Verdict plus evidence for one solve. `solutions` is populated only when
/// consistent; all GeneralSolutions share one slot registry so a single
/// assignment instantiates every unknown coherently.
struct SolveOutcome {
    bool consistent = false;
    std::vector<ConditionResidual> condition_residuals;
    std::map<std::string, GeneralSolution> solutions;
    double tol_res = 1e-8;
    double rhs_scale = 1.0; // 1 + max ||rhs||_F over the solve's right-hand sides
    std::shared_ptr<const SlotRegistry> slots;

    double threshold() const { return tol_res * rhs_scale; }
    /// Conditions whose residual exceeds the threshold (empty iff consistent).
    std::vector<ConditionResidual> violated() const;
};

/// A * X * B = C. Consistent iff R_A*C = 0 and C*L_B = 0; then
/// X = A^+ C B^+ + L_A U + V R_B with free slots U, V.
SolveOutcome solve_axb(const QTensor& a, const QTensor& b, const QTensor& c,
                       const SolveOptions& opts = {});

/// A X B + C Y D = E, free slots U1..U5.
SolveOutcome solve_two_term(const QTensor& a, const QTensor& b, const QTensor& c,
                            const QTensor& d, const QTensor& e, const SolveOptions& opts = {});

/// A X + Y B + C Z1 D + F Z2 G = E, free slots T1..T8.
SolveOutcome solve_mixed(const QTensor& a, const QTensor& b, const QTensor& c, const QTensor& d,
                         const QTensor& f, const QTensor& g, const QTensor& e,
                         const SolveOptions& opts = {});

/// One equation of the three-equation system:
/// a X_i + Y_i b + c Z_i d + f Z_{i+1} g = e.
struct MixedEquation {
    QTensor a, b, c, d, f, g, e;
};

/// The coupled system of three mixed equations with Z_2, Z_3 shared between
/// neighbours. Unknowns X1..X3, Y1..Y3, Z1..Z4.
SolveOutcome solve_triple_system(const std::array<MixedEquation, 3>& eqs,
                                 const SolveOptions& opts = {});

/// One equation of the four-equation chain: a Z_k b + c Z_{k+1} d = e.
struct ChainEquation {
    QTensor a, b, c, d, e;
};

/// The chain system with five unknowns Z1..Z5, solved by reducing the four
/// shared-unknown couplings to a three-equation system.
SolveOutcome solve_chain_system(const std::array<ChainEquation, 4>& eqs,
                                const SolveOptions& opts = {});

/// Deterministic evaluation of a general solution; missing slots are zero.
QTensor instantiate_solution(const GeneralSolution& g,
                             const std::map<std::string, QTensor>& assignment);

} // namespace qts
