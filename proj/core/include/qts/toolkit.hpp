#pragma once

#include <cstdint>

#include "qts/instance.hpp"

namespace qts {

/// Recipe for a generated instance: the system kind, mode lists per named
/// tensor space, a seed that pins every drawn entry, and an optional
/// singular-value spread for the coefficients.
struct InstanceSpec {
    SystemKind kind = SystemKind::axb;
    std::map<std::string, std::vector<std::size_t>> modes; // unnamed spaces default to {2}
    std::uint64_t seed = 0;
    double conditioning = 1.0; // target sigma_max/sigma_min, >= 1
};

/// Space names used by each kind:
///   axb:      I,J,K,L          A:(I;J) X:(J;K) B:(K;L) C:(I;L)
///   two_term: I,J,K,L,Q,H      A:(I;J) X:(J;K) B:(K;L) C:(I;Q) Y:(Q;H) D:(H;L)
///   mixed:    I,K,O,J,Q,P,L,S  A:(I;K) X:(K;J) B:(O;J) Y:(I;O) C:(I;Q)
///                              Z1:(Q;P) D:(P;J) F:(I;L) Z2:(L;S) G:(S;J)
///   triple:   I,K,O,J,Q,P      per-equation mixed coefficients, Z:(Q;P) shared
///   chain:    I,J,Q,P          A,C:(I;Q)  B,D:(P;J)  Z:(Q;P)
std::vector<std::string> space_names(SystemKind kind);

std::map<std::string, TensorShape> coefficient_shapes(const InstanceSpec& spec);
std::map<std::string, TensorShape> unknown_shapes_of(const InstanceSpec& spec);

/// Unknown shapes recovered from a concrete instance's coefficients.
std::map<std::string, TensorShape> unknown_shapes(const Instance& inst);

/// Seeded standard-normal tensor.
QTensor random_tensor(class Rng& rng, const TensorShape& shape);

/// Coefficients and witness unknowns drawn from seeded standard normals;
/// right-hand sides computed by forward evaluation, so the instance is
/// consistent by construction and carries its witness.
Instance gen_consistent(const InstanceSpec& spec);

/// Consistent base instance with one right-hand side pushed out of the
/// reachable range: a unit-norm perturbation filtered through the relevant
/// condition projectors, which lands as residual ~1 on one solvability
/// condition. Coefficient ranks are lowered on retries until the filtered
/// subspace is nonzero; throws GenerationFailure after 16 attempts.
Instance gen_inconsistent(const InstanceSpec& spec);

/// Independent consistency check: assembles the real linear map of the
/// system by evaluating it on every real basis direction of the unknowns and
/// measures the least-squares residual by pivoted Householder QR.
struct OracleResult {
    bool consistent = false;
    double residual = 0.0;
};
OracleResult oracle_solve(const Instance& inst, double tol = 1e-6,
                          std::size_t max_real_dim = 4096);

} // namespace qts
