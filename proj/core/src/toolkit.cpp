#include "qts/toolkit.hpp"

#include <algorithm>
#include <cmath>

#include "qts/errors.hpp"
#include "qts/generalized_inverse.hpp"
#include "qts/rng.hpp"

namespace qts {
namespace {

std::vector<std::size_t> space(const InstanceSpec& spec, const std::string& name) {
    auto it = spec.modes.find(name);
    if (it == spec.modes.end()) return {2};
    for (std::size_t m : it->second) {
        if (m == 0) throw ParseError("mode list for space '" + name + "' contains 0");
    }
    if (it->second.empty()) throw ParseError("mode list for space '" + name + "' is empty");
    return it->second;
}

TensorShape shape_of(const InstanceSpec& spec, const std::string& row, const std::string& col) {
    return TensorShape(space(spec, row), space(spec, col));
}

// (row space, col space) per coefficient / unknown / rhs
struct KindLayout {
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> coeffs;
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> unknowns;
    std::pair<std::string, std::string> rhs;
};

KindLayout layout(SystemKind kind) {
    switch (kind) {
        case SystemKind::axb:
            return {{{"A", {"I", "J"}}, {"B", {"K", "L"}}}, {{"X", {"J", "K"}}}, {"I", "L"}};
        case SystemKind::two_term:
            return {{{"A", {"I", "J"}}, {"B", {"K", "L"}}, {"C", {"I", "Q"}}, {"D", {"H", "L"}}},
                    {{"X", {"J", "K"}}, {"Y", {"Q", "H"}}},
                    {"I", "L"}};
        case SystemKind::mixed:
            return {{{"A", {"I", "K"}},
                     {"B", {"O", "J"}},
                     {"C", {"I", "Q"}},
                     {"D", {"P", "J"}},
                     {"F", {"I", "L"}},
                     {"G", {"S", "J"}}},
                    {{"X", {"K", "J"}}, {"Y", {"I", "O"}}, {"Z1", {"Q", "P"}}, {"Z2", {"L", "S"}}},
                    {"I", "J"}};
        case SystemKind::triple: {
            KindLayout l;
            for (int i = 1; i <= 3; ++i) {
                const std::string n = std::to_string(i);
                l.coeffs.push_back({"A" + n, {"I", "K"}});
                l.coeffs.push_back({"B" + n, {"O", "J"}});
                l.coeffs.push_back({"C" + n, {"I", "Q"}});
                l.coeffs.push_back({"D" + n, {"P", "J"}});
                l.coeffs.push_back({"F" + n, {"I", "Q"}});
                l.coeffs.push_back({"G" + n, {"P", "J"}});
                l.unknowns.push_back({"X" + n, {"K", "J"}});
                l.unknowns.push_back({"Y" + n, {"I", "O"}});
            }
            for (int k = 1; k <= 4; ++k) l.unknowns.push_back({"Z" + std::to_string(k), {"Q", "P"}});
            l.rhs = {"I", "J"};
            return l;
        }
        case SystemKind::chain: {
            KindLayout l;
            for (int k = 1; k <= 4; ++k) {
                const std::string n = std::to_string(k);
                l.coeffs.push_back({"A" + n, {"I", "Q"}});
                l.coeffs.push_back({"B" + n, {"P", "J"}});
                l.coeffs.push_back({"C" + n, {"I", "Q"}});
                l.coeffs.push_back({"D" + n, {"P", "J"}});
            }
            for (int k = 1; k <= 5; ++k) l.unknowns.push_back({"Z" + std::to_string(k), {"Q", "P"}});
            l.rhs = {"I", "J"};
            return l;
        }
    }
    throw Error("layout: unreachable");
}

} // namespace

std::vector<std::string> space_names(SystemKind kind) {
    switch (kind) {
        case SystemKind::axb: return {"I", "J", "K", "L"};
        case SystemKind::two_term: return {"I", "J", "K", "L", "Q", "H"};
        case SystemKind::mixed: return {"I", "K", "O", "J", "Q", "P", "L", "S"};
        case SystemKind::triple: return {"I", "K", "O", "J", "Q", "P"};
        case SystemKind::chain: return {"I", "J", "Q", "P"};
    }
    return {};
}

std::map<std::string, TensorShape> coefficient_shapes(const InstanceSpec& spec) {
    std::map<std::string, TensorShape> out;
    for (const auto& [name, rc] : layout(spec.kind).coeffs) {
        out.emplace(name, shape_of(spec, rc.first, rc.second));
    }
    return out;
}

std::map<std::string, TensorShape> unknown_shapes_of(const InstanceSpec& spec) {
    std::map<std::string, TensorShape> out;
    for (const auto& [name, rc] : layout(spec.kind).unknowns) {
        out.emplace(name, shape_of(spec, rc.first, rc.second));
    }
    return out;
}

std::map<std::string, TensorShape> unknown_shapes(const Instance& inst) {
    std::map<std::string, TensorShape> out;
    auto shape = [&](const std::string& left, const std::string& right) {
        return TensorShape(inst.coeff(left).shape().col_modes,
                           inst.coeff(right).shape().row_modes);
    };
    switch (inst.kind) {
        case SystemKind::axb:
            out.emplace("X", shape("A", "B"));
            break;
        case SystemKind::two_term:
            out.emplace("X", shape("A", "B"));
            out.emplace("Y", shape("C", "D"));
            break;
        case SystemKind::mixed:
            out.emplace("X", TensorShape(inst.coeff("A").shape().col_modes,
                                         inst.rhs.at(0).shape().col_modes));
            out.emplace("Y", TensorShape(inst.rhs.at(0).shape().row_modes,
                                         inst.coeff("B").shape().row_modes));
            out.emplace("Z1", shape("C", "D"));
            out.emplace("Z2", shape("F", "G"));
            break;
        case SystemKind::triple:
            for (int i = 1; i <= 3; ++i) {
                const std::string n = std::to_string(i);
                out.emplace("X" + n,
                            TensorShape(inst.coeff("A" + n).shape().col_modes,
                                        inst.rhs.at(static_cast<std::size_t>(i - 1)).shape().col_modes));
                out.emplace("Y" + n,
                            TensorShape(inst.rhs.at(static_cast<std::size_t>(i - 1)).shape().row_modes,
                                        inst.coeff("B" + n).shape().row_modes));
            }
            for (int k = 1; k <= 4; ++k) out.emplace("Z" + std::to_string(k), shape("C1", "D1"));
            break;
        case SystemKind::chain:
            for (int k = 1; k <= 4; ++k) {
                out.emplace("Z" + std::to_string(k),
                            shape("A" + std::to_string(k), "B" + std::to_string(k)));
            }
            out.emplace("Z5", shape("C4", "D4"));
            break;
    }
    return out;
}

QTensor random_tensor(Rng& rng, const TensorShape& shape) {
    QTensor t(shape);
    for (auto& q : t.data()) q = rng.quaternion();
    return t;
}

namespace {

// Right-module Gram-Schmidt: columns orthonormal under <x,y> = sum conj(x_t) y_t.
QMatrix orthonormal_columns(Rng& rng, std::size_t m, std::size_t k) {
    QMatrix q(m, k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Quaternion> v(m);
        for (auto& e : v) e = rng.quaternion();
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t prev = 0; prev < j; ++prev) {
                Quaternion coef; // <q_prev, v>
                for (std::size_t i = 0; i < m; ++i) coef += qmul(qconj(q.at(i, prev)), v[i]);
                for (std::size_t i = 0; i < m; ++i) v[i] -= qmul(q.at(i, prev), coef);
            }
        }
        double n2 = 0.0;
        for (const auto& e : v) n2 += e.norm_sq();
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < m; ++i) q.at(i, j) = v[i] * inv;
    }
    return q;
}

QTensor conditioned_tensor(Rng& rng, const TensorShape& shape, double spread) {
    const std::size_t m = shape.flat_rows(), n = shape.flat_cols();
    const std::size_t k = std::min(m, n);
    QMatrix u = orthonormal_columns(rng, m, k);
    QMatrix v = orthonormal_columns(rng, n, k);
    QMatrix out(m, n);
    for (std::size_t t = 0; t < k; ++t) {
        const double sigma =
            k == 1 ? 1.0 : std::pow(spread, -static_cast<double>(t) / static_cast<double>(k - 1));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out.at(i, j) += qmul(u.at(i, t), qconj(v.at(j, t))) * sigma;
    }
    return dematricize(out, shape);
}

QTensor rank_limited_tensor(Rng& rng, const TensorShape& shape, std::size_t rank) {
    const std::size_t m = shape.flat_rows(), n = shape.flat_cols();
    if (rank == 0) return QTensor::zeros(shape);
    QMatrix left(m, rank), right(rank, n);
    for (auto& q : left.data()) q = rng.quaternion();
    for (auto& q : right.data()) q = rng.quaternion();
    return dematricize(mat_mul(left, right), shape);
}

Instance draw_instance(const InstanceSpec& spec, Rng& rng,
                       const std::map<std::string, std::size_t>* rank_limits) {
    Instance inst;
    inst.kind = spec.kind;
    inst.seed = spec.seed;
    const KindLayout l = layout(spec.kind);
    for (const auto& [name, rc] : l.coeffs) {
        const TensorShape shape = shape_of(spec, rc.first, rc.second);
        if (rank_limits != nullptr && rank_limits->count(name) != 0) {
            inst.coefficients.emplace(name, rank_limited_tensor(rng, shape, rank_limits->at(name)));
        } else if (spec.conditioning > 1.0) {
            inst.coefficients.emplace(name, conditioned_tensor(rng, shape, spec.conditioning));
        } else {
            inst.coefficients.emplace(name, random_tensor(rng, shape));
        }
    }
    for (const auto& [name, rc] : l.unknowns) {
        inst.witness.emplace(name, random_tensor(rng, shape_of(spec, rc.first, rc.second)));
    }
    inst.rhs = eval_lhs(inst, inst.witness);
    return inst;
}

} // namespace

Instance gen_consistent(const InstanceSpec& spec) {
    Rng rng(spec.seed);
    return draw_instance(spec, rng, nullptr);
}

Instance gen_inconsistent(const InstanceSpec& spec) {
    // Equation to perturb and the left-side coefficients whose ranks shrink
    // over retries (they determine the condition projectors' ranges).
    std::size_t target_eq = 0;
    std::vector<std::string> shrink;
    std::string suffix;
    switch (spec.kind) {
        case SystemKind::axb: shrink = {"A"}; break;
        case SystemKind::two_term: shrink = {"A", "C"}; break;
        case SystemKind::mixed: shrink = {"A", "C", "F"}; break;
        case SystemKind::triple:
            target_eq = 1;
            suffix = "2";
            shrink = {"A2", "C2", "F2"};
            break;
        case SystemKind::chain:
            suffix = "1";
            shrink = {"A1", "C1"};
            break;
    }

    for (int attempt = 0; attempt < 16; ++attempt) {
        Rng rng(spec.seed + 0x9E3779B9u * static_cast<std::uint64_t>(attempt));
        std::map<std::string, std::size_t> limits;
        if (attempt > 0) {
            for (const auto& name : shrink) {
                const TensorShape s = coefficient_shapes(spec).at(name);
                const std::size_t full = std::min(s.flat_rows(), s.flat_cols());
                const std::size_t drop = static_cast<std::size_t>(1 + (attempt - 1) / 2);
                limits[name] = full > drop ? full - drop : 0;
            }
        }
        Instance inst = draw_instance(spec, rng, attempt > 0 ? &limits : nullptr);
        inst.witness.clear();

        // Filter a random direction through the condition projectors so the
        // perturbation lands entirely in one condition tensor.
        const QTensor& e = inst.rhs[target_eq];
        QMatrix w = matricize(random_tensor(rng, e.shape()));
        QMatrix delta;
        switch (spec.kind) {
            case SystemKind::axb: {
                delta = mat_mul(mat_projector_R(matricize(inst.coeff("A"))), w);
                break;
            }
            case SystemKind::two_term: {
                const QMatrix ra = mat_projector_R(matricize(inst.coeff("A")));
                const QMatrix p = mat_mul(ra, matricize(inst.coeff("C")));
                delta = mat_mul(mat_projector_R(p), mat_mul(ra, w));
                break;
            }
            case SystemKind::mixed:
            case SystemKind::triple: {
                const QMatrix ra = mat_projector_R(matricize(inst.coeff("A" + suffix)));
                const QMatrix lb = mat_projector_L(matricize(inst.coeff("B" + suffix)));
                const QMatrix a11 = mat_mul(ra, matricize(inst.coeff("C" + suffix)));
                const QMatrix c11 = mat_mul(ra, matricize(inst.coeff("F" + suffix)));
                const QMatrix m11 = mat_mul(mat_projector_R(a11), c11);
                delta = mat_mul(mat_projector_R(m11),
                                mat_mul(mat_projector_R(a11), mat_mul(ra, mat_mul(w, lb))));
                break;
            }
            case SystemKind::chain: {
                const QMatrix ra = mat_projector_R(matricize(inst.coeff("A1")));
                const QMatrix m1 = mat_mul(ra, matricize(inst.coeff("C1")));
                delta = mat_mul(mat_projector_R(m1), mat_mul(ra, w));
                break;
            }
        }
        const double dn = delta.frobenius_norm();
        if (dn < 1e-6) continue; // filtered subspace is (numerically) zero; lower ranks
        inst.rhs[target_eq] = inst.rhs[target_eq] + dematricize(delta * (1.0 / dn), e.shape());
        return inst;
    }
    throw GenerationFailure("gen_inconsistent: no usable perturbation direction in 16 attempts");
}

} // namespace qts
