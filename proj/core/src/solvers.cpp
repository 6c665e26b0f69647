#include "qts/solvers.hpp"

#include <algorithm>

#include "qts/errors.hpp"
#include "qts/generalized_inverse.hpp"

// Solver engine. Everything here runs on matricized operands; the public
// entry points wrap tensors in and out. The construction is staged: each
// multi-term equation is reduced to a two-term core, shared unknowns of
// neighbouring equations are equated into coupling equations of the same
// shape, and the final coupling is solved outright. Solution sets are affine
// in their free slots, so the whole nest is assembled from AffineForm algebra
// and is validated by substitution in the tests.

namespace qts {

std::vector<ConditionResidual> SolveOutcome::violated() const {
    std::vector<ConditionResidual> out;
    const double thresh = threshold();
    for (const auto& c : condition_residuals)
        if (c.residual > thresh) out.push_back(c);
    return out;
}

namespace {

struct Ctx {
    double tol_rank;
    double zero_floor; // absolute Frobenius floor below which a derived
                       // coefficient matrix counts as exactly zero
};

// Coefficient matrices that are zero in exact arithmetic (typically a product
// with a vanished projector) must not survive as rounding noise: their
// pseudoinverses would amplify the noise by ~1/eps. Right-hand-side-derived
// quantities are never chopped.
QMatrix chop(QMatrix m, const Ctx& ctx) {
    if (!m.is_zero() && m.frobenius_norm() <= ctx.zero_floor) {
        return QMatrix::zeros(m.rows(), m.cols());
    }
    return m;
}

struct Pins {
    QMatrix dag; // pseudoinverse
    QMatrix L;   // I - dag*m, exact zero at full column rank
    QMatrix R;   // I - m*dag, exact zero at full row rank
};

Pins pins(const QMatrix& m, const Ctx& ctx) {
    PinvResult pr;
    try {
        pr = mat_pinv_rank(m, ctx.tol_rank);
    } catch (const StructureViolation& e) {
        // Happens when a derived operand is a structural zero whose rounding
        // noise escaped the chop floor: its singular directions pair up
        // arbitrarily and the pseudoinverse loses the quaternion block
        // structure. At that point no rank decision is trustworthy.
        throw InternalInconsistency(
            std::string("derived operand has no reliable pseudoinverse (") + e.what() +
            "); instance too ill-conditioned for this construction at double precision");
    }
    Pins p;
    p.L = (pr.rank == m.cols()) ? QMatrix::zeros(m.cols(), m.cols())
                                : QMatrix::identity(m.cols()) - mat_mul(pr.pinv, m);
    p.R = (pr.rank == m.rows()) ? QMatrix::zeros(m.rows(), m.rows())
                                : QMatrix::identity(m.rows()) - mat_mul(m, pr.pinv);
    p.dag = std::move(pr.pinv);
    return p;
}

// ---------------------------------------------------------------------------
// Two-term core: A X B + C Y D = E with P = R_A C, Q = D L_B, S = C L_P.
// ---------------------------------------------------------------------------

struct TwoTermCore {
    QMatrix A, B, C, D, E;
    Pins a, b, c, d, p, q, s;
    QMatrix P, Q, S;
    QMatrix Xpart, Ypart;
    QMatrix AdS;    // A^+ S      (left factor of the shared-slot term in X)
    QMatrix RQDBd;  // R_Q D B^+  (right factor of the shared-slot term in X)
    QMatrix LPLS;   // L_P L_S
    std::array<double, 4> cond{};

    std::size_t x_rows() const { return A.cols(); }
    std::size_t x_cols() const { return B.rows(); }
    std::size_t y_rows() const { return C.cols(); }
    std::size_t y_cols() const { return D.rows(); }
};

TwoTermCore reduce_two_term(QMatrix A, QMatrix B, QMatrix C, QMatrix D, QMatrix E,
                            const Ctx& ctx) {
    TwoTermCore t;
    t.A = std::move(A);
    t.B = std::move(B);
    t.C = std::move(C);
    t.D = std::move(D);
    t.E = std::move(E);
    t.a = pins(t.A, ctx);
    t.b = pins(t.B, ctx);
    t.c = pins(t.C, ctx);
    t.d = pins(t.D, ctx);
    t.P = chop(mat_mul(t.a.R, t.C), ctx);
    t.Q = chop(mat_mul(t.D, t.b.L), ctx);
    t.p = pins(t.P, ctx);
    t.S = chop(mat_mul(t.C, t.p.L), ctx);
    t.q = pins(t.Q, ctx);
    t.s = pins(t.S, ctx);

    const QMatrix RAE = mat_mul(t.a.R, t.E);
    const QMatrix ELB = mat_mul(t.E, t.b.L);
    t.cond[0] = mat_mul(t.p.R, RAE).frobenius_norm();
    t.cond[1] = mat_mul(ELB, t.q.L).frobenius_norm();
    t.cond[2] = mat_mul(RAE, t.d.L).frobenius_norm();
    t.cond[3] = mat_mul(t.c.R, ELB).frobenius_norm();

    // Particular solution, staged:
    //   P Y D = R_A E        gives the P^+ E D^+ part (P^+ R_A = P^+),
    //   S Ya Q = E L_B - C P^+ E D^+ Q   gives the L_P component of Y,
    //   A X B = E - C Y D    gives X.
    const QMatrix PdED = mat_mul(t.p.dag, mat_mul(t.E, t.d.dag));
    const QMatrix K = ELB - mat_mul(t.C, mat_mul(PdED, t.Q));
    t.Ypart = PdED + mat_mul(t.s.dag, mat_mul(K, t.q.dag));
    t.Xpart = mat_mul(t.a.dag, mat_mul(t.E - mat_mul(t.C, mat_mul(t.Ypart, t.D)), t.b.dag));

    t.AdS = mat_mul(t.a.dag, t.S);
    t.RQDBd = mat_mul(t.q.R, mat_mul(t.D, t.b.dag));
    t.LPLS = mat_mul(t.p.L, t.s.L);
    return t;
}

const char* kTwoTermLabels[4] = {"RP*RA*E", "E*LB*LQ", "RA*E*LD", "RC*E*LB"};

void append_conditions(std::vector<ConditionResidual>& out, const TwoTermCore& t,
                       const std::string& prefix) {
    for (int i = 0; i < 4; ++i) out.push_back({prefix + kTwoTermLabels[i], t.cond[i]});
}

// General solution of the two-term core as affine forms.
//   X = Xpart - (A^+ S) u2 (R_Q D B^+) + L_A u4 + u5 R_B
//   Y = Ypart + (L_P L_S) u1 + L_P u2 R_Q + u3 R_D
AffineForm twoterm_X(const TwoTermCore& t, const AffineForm& u2, const AffineForm& u4,
                     const AffineForm& u5) {
    AffineForm x{t.Xpart};
    x -= rmul(lmul(t.AdS, u2), t.RQDBd);
    x += lmul(t.a.L, u4);
    x += rmul(u5, t.b.R);
    return x;
}

AffineForm twoterm_Y(const TwoTermCore& t, const AffineForm& u1, const AffineForm& u2,
                     const AffineForm& u3) {
    AffineForm y{t.Ypart};
    y += lmul(t.LPLS, u1);
    y += rmul(lmul(t.p.L, u2), t.q.R);
    y += rmul(u3, t.d.R);
    return y;
}

// ---------------------------------------------------------------------------
// Mixed core: A X + Y B + C Z1 D + F Z2 G = E. Reduced to the two-term
// equation (R_A C) Z1 (D L_B) + (R_A F) Z2 (G L_B) = R_A E L_B; X and Y then
// come from A X + Y B = E - C Z1 D - F Z2 G.
// ---------------------------------------------------------------------------

struct MixedCore {
    QMatrix A, B, C, D, F, G, E;
    Pins a, b;
    TwoTermCore core;
};

MixedCore reduce_mixed(QMatrix A, QMatrix B, QMatrix C, QMatrix D, QMatrix F, QMatrix G,
                       QMatrix E, const Ctx& ctx) {
    MixedCore m;
    m.A = std::move(A);
    m.B = std::move(B);
    m.C = std::move(C);
    m.D = std::move(D);
    m.F = std::move(F);
    m.G = std::move(G);
    m.E = std::move(E);
    m.a = pins(m.A, ctx);
    m.b = pins(m.B, ctx);
    QMatrix A11 = chop(mat_mul(m.a.R, m.C), ctx);
    QMatrix B11 = chop(mat_mul(m.D, m.b.L), ctx);
    QMatrix C11 = chop(mat_mul(m.a.R, m.F), ctx);
    QMatrix D11 = chop(mat_mul(m.G, m.b.L), ctx);
    QMatrix E11 = mat_mul(m.a.R, mat_mul(m.E, m.b.L));
    m.core = reduce_two_term(std::move(A11), std::move(B11), std::move(C11), std::move(D11),
                             std::move(E11), ctx);
    return m;
}

AffineForm mixed_Z1(const MixedCore& m, const AffineForm& t4, const AffineForm& t5,
                    const AffineForm& t6) {
    return twoterm_X(m.core, t4, t5, t6);
}

AffineForm mixed_Z2(const MixedCore& m, const AffineForm& t7, const AffineForm& t4,
                    const AffineForm& t8) {
    return twoterm_Y(m.core, t7, t4, t8);
}

AffineForm mixed_inner(const MixedCore& m, const AffineForm& z1, const AffineForm& z2) {
    AffineForm r{m.E};
    r -= rmul(lmul(m.C, z1), m.D);
    r -= rmul(lmul(m.F, z2), m.G);
    return r; // E - C Z1 D - F Z2 G
}

AffineForm mixed_X(const MixedCore& m, const AffineForm& inner, const AffineForm& t1,
                   const AffineForm& t2) {
    AffineForm x = lmul(m.a.dag, inner);
    x -= rmul(t1, m.B);
    x += lmul(m.a.L, t2);
    return x;
}

AffineForm mixed_Y(const MixedCore& m, const AffineForm& inner, const AffineForm& t1,
                   const AffineForm& t3) {
    AffineForm y = rmul(lmul(m.a.R, inner), m.b.dag);
    y += lmul(m.A, t1);
    y += rmul(t3, m.b.R);
    return y;
}

// Row/column selectors for splitting stacked unknowns.
QMatrix rows_selector(std::size_t n, bool top) {
    QMatrix s(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) s.at(i, top ? i : n + i) = Quaternion::one();
    return s;
}

QMatrix cols_selector(std::size_t n, bool left) {
    QMatrix s(2 * n, n);
    for (std::size_t i = 0; i < n; ++i) s.at(left ? i : n + i, i) = Quaternion::one();
    return s;
}

// Coupling equation between the Z_{j+1} expression of equation j (two-term
// core cj, Y-role) and the Z_{j+1} expression of equation j+1 (core cj1,
// X-role). Moving all slot terms left yields another mixed equation:
//   [L_P L_S | -L_A'] [t_j7; t_{j+1,5}] + [t_j8 | t_{j+1,6}] [R_D; -R_B']
//   + L_P t_j4 R_Q + (A'^+ S') t_{j+1,4} (R_Q' D' B'^+) = Xpart' - Ypart
// (primes: quantities of core j+1).
MixedCore make_coupling(const TwoTermCore& cj, const TwoTermCore& cj1, const Ctx& ctx) {
    QMatrix A = chop(hstack(cj.LPLS, -cj1.a.L), ctx);
    QMatrix B = chop(vstack(cj.d.R, -cj1.b.R), ctx);
    QMatrix C = cj.p.L;
    QMatrix D = cj.q.R;
    QMatrix F = cj1.AdS;
    QMatrix G = cj1.RQDBd;
    QMatrix E = cj1.Xpart - cj.Ypart;
    return reduce_mixed(std::move(A), std::move(B), std::move(C), std::move(D), std::move(F),
                        std::move(G), std::move(E), ctx);
}

// ---------------------------------------------------------------------------
// Triple engine
// ---------------------------------------------------------------------------

struct TripleSlotShapes {
    std::array<TensorShape, 3> t1; // slot T_i1: (A_i col side; B_i row side)
    std::array<TensorShape, 3> x;  // X_i
    std::array<TensorShape, 3> y;  // Y_i
    TensorShape z;                 // shared Z shape
};

struct TripleMatInput {
    QMatrix A, B, C, D, F, G, E;
};

struct TripleEngineResult {
    std::vector<ConditionResidual> conds;
    bool consistent = false;
    std::array<AffineForm, 3> X, Y;
    std::array<AffineForm, 4> Z;
    double internal_mismatch = 0.0;
    std::vector<double> substitution; // per-equation particular residuals
};

TripleEngineResult solve_triple_mat(std::array<TripleMatInput, 3> in, const Ctx& ctx,
                                    SlotRegistry& reg, const TripleSlotShapes& shapes,
                                    double thresh, const std::string& label_prefix) {
    TripleEngineResult res;

    std::array<MixedCore, 3> m;
    for (int i = 0; i < 3; ++i) {
        m[i] = reduce_mixed(std::move(in[i].A), std::move(in[i].B), std::move(in[i].C),
                            std::move(in[i].D), std::move(in[i].F), std::move(in[i].G),
                            std::move(in[i].E), ctx);
        append_conditions(res.conds, m[i].core,
                          label_prefix + "eq" + std::to_string(i + 1) + ".reduced.");
    }

    std::array<MixedCore, 2> cpl = {make_coupling(m[0].core, m[1].core, ctx),
                                    make_coupling(m[1].core, m[2].core, ctx)};
    append_conditions(res.conds, cpl[0].core, label_prefix + "link12.reduced.");
    append_conditions(res.conds, cpl[1].core, label_prefix + "link23.reduced.");

    MixedCore fin = make_coupling(cpl[0].core, cpl[1].core, ctx);
    append_conditions(res.conds, fin.core, label_prefix + "final.reduced.");

    res.consistent = std::all_of(res.conds.begin(), res.conds.end(),
                                 [&](const ConditionResidual& c) { return c.residual <= thresh; });
    if (!res.consistent) return res;

    const std::size_t zr = shapes.z.flat_rows();
    const std::size_t zc = shapes.z.flat_cols();
    const TensorShape stacked_rows({2 * zr}, shapes.z.col_modes);
    const TensorShape stacked_cols(shapes.z.row_modes, {2 * zc});
    const TensorShape stacked_both({2 * zr}, {2 * zc});

    auto zslot = [&](const std::string& name) {
        return AffineForm::slot(reg.add(name, shapes.z), zr, zc);
    };

    // Level 3: the final coupling determines U14 and U24 outright.
    AffineForm V[9]; // 1-based
    V[1] = AffineForm::slot(reg.add("V1", stacked_both), 2 * zr, 2 * zc);
    V[2] = AffineForm::slot(reg.add("V2", stacked_rows), 2 * zr, zc);
    V[3] = AffineForm::slot(reg.add("V3", stacked_cols), zr, 2 * zc);
    for (int t = 4; t <= 8; ++t) V[t] = zslot("V" + std::to_string(t));

    const AffineForm U14 = mixed_Z1(fin, V[4], V[5], V[6]);
    const AffineForm U24 = mixed_Z2(fin, V[7], V[4], V[8]);
    const AffineForm inner_fin = mixed_inner(fin, U14, U24);
    const AffineForm XXf = mixed_X(fin, inner_fin, V[1], V[2]);
    const AffineForm YYf = mixed_Y(fin, inner_fin, V[1], V[3]);

    const QMatrix top = rows_selector(zr, true), bot = rows_selector(zr, false);
    const QMatrix left = cols_selector(zc, true), right = cols_selector(zc, false);
    const AffineForm U17 = lmul(top, XXf), U25 = lmul(bot, XXf);
    const AffineForm U18 = rmul(YYf, left), U26 = rmul(YYf, right);

    // Level 2, link12: determines T14 and T24 (first derivation of T24).
    const AffineForm U15 = zslot("U15"), U16 = zslot("U16");
    const AffineForm T14 = mixed_Z1(cpl[0], U14, U15, U16);
    const AffineForm T24 = mixed_Z2(cpl[0], U17, U14, U18);

    AffineForm U11 = AffineForm::slot(reg.add("U11", stacked_both), 2 * zr, 2 * zc);
    AffineForm U12 = AffineForm::slot(reg.add("U12", stacked_rows), 2 * zr, zc);
    AffineForm U13 = AffineForm::slot(reg.add("U13", stacked_cols), zr, 2 * zc);
    const AffineForm inner0 = mixed_inner(cpl[0], T14, T24);
    const AffineForm XX0 = mixed_X(cpl[0], inner0, U11, U12);
    const AffineForm YY0 = mixed_Y(cpl[0], inner0, U11, U13);
    const AffineForm T17 = lmul(top, XX0), T25 = lmul(bot, XX0);
    const AffineForm T18 = rmul(YY0, left), T26 = rmul(YY0, right);

    // Level 2, link23: T24's second derivation (X-role) must agree; T34 is new.
    const AffineForm U27 = zslot("U27"), U28 = zslot("U28");
    const AffineForm T24_alt = mixed_Z1(cpl[1], U24, U25, U26);
    const AffineForm T34 = mixed_Z2(cpl[1], U27, U24, U28);

    AffineForm U21 = AffineForm::slot(reg.add("U21", stacked_both), 2 * zr, 2 * zc);
    AffineForm U22 = AffineForm::slot(reg.add("U22", stacked_rows), 2 * zr, zc);
    AffineForm U23 = AffineForm::slot(reg.add("U23", stacked_cols), zr, 2 * zc);
    const AffineForm inner1 = mixed_inner(cpl[1], T24, T34);
    const AffineForm XX1 = mixed_X(cpl[1], inner1, U21, U22);
    const AffineForm YY1 = mixed_Y(cpl[1], inner1, U21, U23);
    const AffineForm T27 = lmul(top, XX1), T35 = lmul(bot, XX1);
    const AffineForm T28 = rmul(YY1, left), T36 = rmul(YY1, right);

    // Level 1 back-substitution. Shared unknowns use the first equation's
    // expression with the coupling-solved parameters substituted.
    const AffineForm T15 = zslot("T15"), T16 = zslot("T16");
    const AffineForm T37 = zslot("T37"), T38 = zslot("T38");
    res.Z[0] = mixed_Z1(m[0], T14, T15, T16);
    res.Z[1] = mixed_Z2(m[0], T17, T14, T18);
    res.Z[2] = mixed_Z2(m[1], T27, T24, T28);
    res.Z[3] = mixed_Z2(m[2], T37, T34, T38);

    for (int i = 0; i < 3; ++i) {
        const std::string n = std::to_string(i + 1);
        AffineForm t1 = AffineForm::slot(reg.add("T" + n + "1", shapes.t1[i]),
                                         shapes.t1[i].flat_rows(), shapes.t1[i].flat_cols());
        AffineForm t2 = AffineForm::slot(reg.add("T" + n + "2", shapes.x[i]),
                                         shapes.x[i].flat_rows(), shapes.x[i].flat_cols());
        AffineForm t3 = AffineForm::slot(reg.add("T" + n + "3", shapes.y[i]),
                                         shapes.y[i].flat_rows(), shapes.y[i].flat_cols());
        const AffineForm inner = mixed_inner(m[i], res.Z[i], res.Z[i + 1]);
        res.X[i] = mixed_X(m[i], inner, t1, t2);
        res.Y[i] = mixed_Y(m[i], inner, t1, t3);
    }

    // Dual derivations of the shared unknowns must coincide; a gap means the
    // rank decisions contradicted each other somewhere in the nest.
    const AffineForm Z2_alt = mixed_Z1(m[1], T24, T25, T26);
    const AffineForm Z3_alt = mixed_Z1(m[2], T34, T35, T36);
    res.internal_mismatch = std::max(
        {(T24_alt.particular() - T24.particular()).frobenius_norm(),
         (Z2_alt.particular() - res.Z[1].particular()).frobenius_norm(),
         (Z3_alt.particular() - res.Z[2].particular()).frobenius_norm()});
    for (int i = 0; i < 3; ++i) {
        res.substitution.push_back(
            (mat_mul(m[i].A, res.X[i].particular()) +
             mat_mul(res.Y[i].particular(), m[i].B) +
             mat_mul(m[i].C, mat_mul(res.Z[i].particular(), m[i].D)) +
             mat_mul(m[i].F, mat_mul(res.Z[i + 1].particular(), m[i].G)) - m[i].E)
                .frobenius_norm());
    }
    return res;
}

// ---------------------------------------------------------------------------
// Tensor-side plumbing
// ---------------------------------------------------------------------------

void require(bool ok, const std::string& msg) {
    if (!ok) throw ShapeMismatch(msg);
}

Ctx make_ctx(const SolveOptions& opts, double scale) {
    return Ctx{opts.tol_rank, 1e-13 * scale};
}

std::shared_ptr<SlotRegistry> fresh_registry() { return std::make_shared<SlotRegistry>(); }

void finish(SolveOutcome& out, std::shared_ptr<SlotRegistry> reg,
            std::vector<std::pair<std::string, std::pair<AffineForm, TensorShape>>> forms) {
    out.slots = reg;
    for (auto& [name, fs] : forms) {
        out.solutions.emplace(name, GeneralSolution(out.slots, std::move(fs.first),
                                                    std::move(fs.second)));
    }
}

void check_internal(double mismatch, double scale, const std::string& who) {
    if (mismatch > 1e-6 * scale) {
        throw InternalInconsistency(who + ": shared-unknown derivations disagree by " +
                                    std::to_string(mismatch) +
                                    " (tolerance policy failure; scale " +
                                    std::to_string(scale) + ")");
    }
}

// The particular solution must substitute back into the source equations.
// On badly conditioned inputs the zero-parameter particular can pass through
// intermediates of magnitude ~ condition^depth, and cancellation can leave a
// residual far above anything rounding explains at the instance's scale; a
// silent wrong answer is worse than an honest failure.
void check_substitution(const std::vector<double>& residuals, double scale,
                        const std::string& who) {
    double worst = 0.0;
    for (double r : residuals) worst = std::max(worst, r);
    if (worst > 1e-6 * scale) {
        std::string all;
        for (double r : residuals) all += (all.empty() ? "" : ", ") + std::to_string(r);
        throw InternalInconsistency(
            who + ": particular solution fails substitution (equation residuals " + all +
            "; scale " + std::to_string(scale) +
            "). The instance is too ill-conditioned for this construction at double precision.");
    }
}

} // namespace

SolveOutcome solve_axb(const QTensor& a, const QTensor& b, const QTensor& c,
                       const SolveOptions& opts) {
    require(a.shape().row_modes == c.shape().row_modes,
            "solve_axb: A row modes must match C row modes");
    require(b.shape().col_modes == c.shape().col_modes,
            "solve_axb: B col modes must match C col modes");

    SolveOutcome out;
    out.tol_res = opts.tol_res;
    out.rhs_scale = 1.0 + c.frobenius_norm();
    const double coeff_scale = 1.0 + std::max(a.frobenius_norm(), b.frobenius_norm());
    const Ctx ctx = make_ctx(opts, std::max(out.rhs_scale, coeff_scale));

    const QMatrix A = matricize(a), B = matricize(b), C = matricize(c);
    const Pins pa = pins(A, ctx), pb = pins(B, ctx);
    out.condition_residuals = {{"RA*C", mat_mul(pa.R, C).frobenius_norm()},
                               {"C*LB", mat_mul(C, pb.L).frobenius_norm()}};
    out.consistent = out.violated().empty();
    if (!out.consistent) return out;

    const TensorShape xshape(a.shape().col_modes, b.shape().row_modes);
    auto reg = fresh_registry();
    AffineForm u = AffineForm::slot(reg->add("U", xshape), xshape.flat_rows(), xshape.flat_cols());
    AffineForm v = AffineForm::slot(reg->add("V", xshape), xshape.flat_rows(), xshape.flat_cols());
    AffineForm x{mat_mul(pa.dag, mat_mul(C, pb.dag))};
    x += lmul(pa.L, u);
    x += rmul(v, pb.R);
    finish(out, reg, {{"X", {std::move(x), xshape}}});
    return out;
}

SolveOutcome solve_two_term(const QTensor& a, const QTensor& b, const QTensor& c,
                            const QTensor& d, const QTensor& e, const SolveOptions& opts) {
    require(a.shape().row_modes == e.shape().row_modes,
            "solve_two_term: A row modes must match E row modes");
    require(c.shape().row_modes == e.shape().row_modes,
            "solve_two_term: C row modes must match E row modes");
    require(b.shape().col_modes == e.shape().col_modes,
            "solve_two_term: B col modes must match E col modes");
    require(d.shape().col_modes == e.shape().col_modes,
            "solve_two_term: D col modes must match E col modes");

    SolveOutcome out;
    out.tol_res = opts.tol_res;
    out.rhs_scale = 1.0 + e.frobenius_norm();
    double chop_scale = out.rhs_scale;
    for (const auto* t : {&a, &b, &c, &d}) {
        chop_scale = std::max(chop_scale, 1.0 + t->frobenius_norm());
    }
    const Ctx ctx = make_ctx(opts, chop_scale);

    TwoTermCore core = reduce_two_term(matricize(a), matricize(b), matricize(c), matricize(d),
                                       matricize(e), ctx);
    append_conditions(out.condition_residuals, core, "");
    out.consistent = out.violated().empty();
    if (!out.consistent) return out;

    const TensorShape xshape(a.shape().col_modes, b.shape().row_modes);
    const TensorShape yshape(c.shape().col_modes, d.shape().row_modes);
    auto reg = fresh_registry();
    auto slot = [&](const char* n, const TensorShape& s) {
        return AffineForm::slot(reg->add(n, s), s.flat_rows(), s.flat_cols());
    };
    AffineForm u1 = slot("U1", yshape), u2 = slot("U2", yshape), u3 = slot("U3", yshape);
    AffineForm u4 = slot("U4", xshape), u5 = slot("U5", xshape);
    AffineForm x = twoterm_X(core, u2, u4, u5);
    AffineForm y = twoterm_Y(core, u1, u2, u3);
    check_substitution(
        {(mat_mul(core.A, mat_mul(x.particular(), core.B)) +
          mat_mul(core.C, mat_mul(y.particular(), core.D)) - core.E)
             .frobenius_norm()},
        out.rhs_scale, "solve_two_term");
    finish(out, reg, {{"X", {std::move(x), xshape}}, {"Y", {std::move(y), yshape}}});
    return out;
}

SolveOutcome solve_mixed(const QTensor& a, const QTensor& b, const QTensor& c, const QTensor& d,
                         const QTensor& f, const QTensor& g, const QTensor& e,
                         const SolveOptions& opts) {
    for (const auto* t : {&a, &c, &f}) {
        require(t->shape().row_modes == e.shape().row_modes,
                "solve_mixed: left coefficient row modes must match E row modes");
    }
    for (const auto* t : {&b, &d, &g}) {
        require(t->shape().col_modes == e.shape().col_modes,
                "solve_mixed: right coefficient col modes must match E col modes");
    }

    SolveOutcome out;
    out.tol_res = opts.tol_res;
    out.rhs_scale = 1.0 + e.frobenius_norm();
    double chop_scale = out.rhs_scale;
    for (const auto* t : {&a, &b, &c, &d, &f, &g}) {
        chop_scale = std::max(chop_scale, 1.0 + t->frobenius_norm());
    }
    const Ctx ctx = make_ctx(opts, chop_scale);

    MixedCore m = reduce_mixed(matricize(a), matricize(b), matricize(c), matricize(d),
                               matricize(f), matricize(g), matricize(e), ctx);
    append_conditions(out.condition_residuals, m.core, "reduced.");
    out.consistent = out.violated().empty();
    if (!out.consistent) return out;

    const TensorShape xshape(a.shape().col_modes, e.shape().col_modes);
    const TensorShape yshape(e.shape().row_modes, b.shape().row_modes);
    const TensorShape z1shape(c.shape().col_modes, d.shape().row_modes);
    const TensorShape z2shape(f.shape().col_modes, g.shape().row_modes);
    const TensorShape t1shape(a.shape().col_modes, b.shape().row_modes);
    auto reg = fresh_registry();
    auto slot = [&](const char* n, const TensorShape& s) {
        return AffineForm::slot(reg->add(n, s), s.flat_rows(), s.flat_cols());
    };
    AffineForm t1 = slot("T1", t1shape), t2 = slot("T2", xshape), t3 = slot("T3", yshape);
    AffineForm t4 = slot("T4", z2shape), t5 = slot("T5", z1shape), t6 = slot("T6", z1shape);
    AffineForm t7 = slot("T7", z2shape), t8 = slot("T8", z2shape);

    AffineForm z1 = mixed_Z1(m, t4, t5, t6);
    AffineForm z2 = mixed_Z2(m, t7, t4, t8);
    AffineForm inner = mixed_inner(m, z1, z2);
    AffineForm x = mixed_X(m, inner, t1, t2);
    AffineForm y = mixed_Y(m, inner, t1, t3);
    check_substitution(
        {(mat_mul(m.A, x.particular()) + mat_mul(y.particular(), m.B) +
          mat_mul(m.C, mat_mul(z1.particular(), m.D)) +
          mat_mul(m.F, mat_mul(z2.particular(), m.G)) - m.E)
             .frobenius_norm()},
        out.rhs_scale, "solve_mixed");
    finish(out, reg,
           {{"X", {std::move(x), xshape}},
            {"Y", {std::move(y), yshape}},
            {"Z1", {std::move(z1), z1shape}},
            {"Z2", {std::move(z2), z2shape}}});
    return out;
}

SolveOutcome solve_triple_system(const std::array<MixedEquation, 3>& eqs,
                                 const SolveOptions& opts) {
    const TensorShape zshape(eqs[0].c.shape().col_modes, eqs[0].d.shape().row_modes);
    for (int i = 0; i < 3; ++i) {
        const auto& q = eqs[i];
        const std::string n = "solve_triple_system: equation " + std::to_string(i + 1);
        for (const auto* t : {&q.a, &q.c, &q.f}) {
            require(t->shape().row_modes == q.e.shape().row_modes,
                    n + ": left coefficient row modes must match E row modes");
        }
        for (const auto* t : {&q.b, &q.d, &q.g}) {
            require(t->shape().col_modes == q.e.shape().col_modes,
                    n + ": right coefficient col modes must match E col modes");
        }
        require(q.c.shape().col_modes == zshape.row_modes &&
                    q.f.shape().col_modes == zshape.row_modes,
                n + ": Z row modes must be shared across equations");
        require(q.d.shape().row_modes == zshape.col_modes &&
                    q.g.shape().row_modes == zshape.col_modes,
                n + ": Z col modes must be shared across equations");
    }

    SolveOutcome out;
    out.tol_res = opts.tol_res;
    out.rhs_scale = 1.0;
    double chop_scale = 1.0;
    for (const auto& q : eqs) {
        out.rhs_scale = std::max(out.rhs_scale, 1.0 + q.e.frobenius_norm());
        for (const auto* t : {&q.a, &q.b, &q.c, &q.d, &q.f, &q.g}) {
            chop_scale = std::max(chop_scale, 1.0 + t->frobenius_norm());
        }
    }
    const Ctx ctx = make_ctx(opts, std::max(out.rhs_scale, chop_scale));

    std::array<TripleMatInput, 3> in;
    TripleSlotShapes shapes;
    shapes.z = zshape;
    for (int i = 0; i < 3; ++i) {
        in[i] = {matricize(eqs[i].a), matricize(eqs[i].b), matricize(eqs[i].c),
                 matricize(eqs[i].d), matricize(eqs[i].f), matricize(eqs[i].g),
                 matricize(eqs[i].e)};
        shapes.t1[i] = TensorShape(eqs[i].a.shape().col_modes, eqs[i].b.shape().row_modes);
        shapes.x[i] = TensorShape(eqs[i].a.shape().col_modes, eqs[i].e.shape().col_modes);
        shapes.y[i] = TensorShape(eqs[i].e.shape().row_modes, eqs[i].b.shape().row_modes);
    }

    auto reg = fresh_registry();
    TripleEngineResult r =
        solve_triple_mat(std::move(in), ctx, *reg, shapes, out.threshold(), "");
    out.condition_residuals = std::move(r.conds);
    out.consistent = r.consistent;
    if (!out.consistent) return out;
    check_internal(r.internal_mismatch, out.rhs_scale, "solve_triple_system");
    check_substitution(r.substitution, out.rhs_scale, "solve_triple_system");

    std::vector<std::pair<std::string, std::pair<AffineForm, TensorShape>>> forms;
    for (int i = 0; i < 3; ++i) {
        forms.push_back({"X" + std::to_string(i + 1), {std::move(r.X[i]), shapes.x[i]}});
        forms.push_back({"Y" + std::to_string(i + 1), {std::move(r.Y[i]), shapes.y[i]}});
    }
    for (int k = 0; k < 4; ++k) {
        forms.push_back({"Z" + std::to_string(k + 1), {std::move(r.Z[k]), zshape}});
    }
    finish(out, reg, std::move(forms));
    return out;
}

SolveOutcome solve_chain_system(const std::array<ChainEquation, 4>& eqs,
                                const SolveOptions& opts) {
    // All five unknowns share one shape (the chain couples neighbours, and
    // the coefficient spaces are common to all four equations).
    const TensorShape zshape(eqs[0].a.shape().col_modes, eqs[0].b.shape().row_modes);
    for (int k = 0; k < 4; ++k) {
        const auto& q = eqs[k];
        const std::string n = "solve_chain_system: equation " + std::to_string(k + 1);
        require(q.a.shape().row_modes == q.e.shape().row_modes &&
                    q.c.shape().row_modes == q.e.shape().row_modes,
                n + ": A/C row modes must match E row modes");
        require(q.b.shape().col_modes == q.e.shape().col_modes &&
                    q.d.shape().col_modes == q.e.shape().col_modes,
                n + ": B/D col modes must match E col modes");
        require(q.a.shape().col_modes == zshape.row_modes &&
                    q.c.shape().col_modes == zshape.row_modes,
                n + ": unknown row modes must be shared across equations");
        require(q.b.shape().row_modes == zshape.col_modes &&
                    q.d.shape().row_modes == zshape.col_modes,
                n + ": unknown col modes must be shared across equations");
    }

    SolveOutcome out;
    out.tol_res = opts.tol_res;
    out.rhs_scale = 1.0;
    double chop_scale = 1.0;
    for (const auto& q : eqs) {
        out.rhs_scale = std::max(out.rhs_scale, 1.0 + q.e.frobenius_norm());
        for (const auto* t : {&q.a, &q.b, &q.c, &q.d}) {
            chop_scale = std::max(chop_scale, 1.0 + t->frobenius_norm());
        }
    }
    const Ctx ctx = make_ctx(opts, std::max(out.rhs_scale, chop_scale));

    std::array<TwoTermCore, 4> tk;
    for (int k = 0; k < 4; ++k) {
        tk[k] = reduce_two_term(matricize(eqs[k].a), matricize(eqs[k].b), matricize(eqs[k].c),
                                matricize(eqs[k].d), matricize(eqs[k].e), ctx);
        append_conditions(out.condition_residuals, tk[k],
                          "eq" + std::to_string(k + 1) + ".");
    }

    // The shared-unknown couplings of the four chain equations form exactly a
    // three-equation system in the W parameters; its Z-roles are the shared
    // slots W_12..W_42.
    std::array<TripleMatInput, 3> red;
    TripleSlotShapes shapes;
    for (int i = 0; i < 3; ++i) {
        red[i].A = chop(hstack(tk[i].LPLS, -tk[i + 1].a.L), ctx);
        red[i].B = chop(vstack(tk[i].d.R, -tk[i + 1].b.R), ctx);
        red[i].C = tk[i].p.L;
        red[i].D = tk[i].q.R;
        red[i].F = tk[i + 1].AdS;
        red[i].G = tk[i + 1].RQDBd;
        red[i].E = tk[i + 1].Xpart - tk[i].Ypart;
    }
    // Slot shapes of the reduced system live in stacked synthetic spaces over
    // the unknown shape.
    const std::size_t zr = zshape.flat_rows(), zc = zshape.flat_cols();
    shapes.z = zshape;
    for (int i = 0; i < 3; ++i) {
        shapes.t1[i] = TensorShape({2 * zr}, {2 * zc});
        shapes.x[i] = TensorShape({2 * zr}, zshape.col_modes);
        shapes.y[i] = TensorShape(zshape.row_modes, {2 * zc});
    }

    auto reg = fresh_registry();
    TripleEngineResult tri =
        solve_triple_mat(std::move(red), ctx, *reg, shapes, out.threshold(), "coupled.");
    for (auto& c : tri.conds) out.condition_residuals.push_back(std::move(c));
    out.consistent = std::all_of(
        out.condition_residuals.begin(), out.condition_residuals.end(),
        [&](const ConditionResidual& c) { return c.residual <= out.threshold(); });
    if (!out.consistent) return out;
    check_internal(tri.internal_mismatch, out.rhs_scale, "solve_chain_system");

    // Unpack the stacked unknowns: X_i = [W_i1; W_{i+1},4], Y_i = [W_i3 | W_{i+1},5],
    // Z-roles are W_12..W_42.
    const QMatrix top = rows_selector(zr, true), bot = rows_selector(zr, false);
    const QMatrix left = cols_selector(zc, true), right = cols_selector(zc, false);
    std::array<AffineForm, 4> W1, W3;
    std::array<AffineForm, 4> W2 = std::move(tri.Z);
    for (int i = 0; i < 3; ++i) {
        W1[i] = lmul(top, tri.X[i]);
        W3[i] = rmul(tri.Y[i], left);
    }
    auto wslot = [&](const char* n) {
        return AffineForm::slot(reg->add(n, zshape), zr, zc);
    };
    W1[3] = wslot("W41");
    W3[3] = wslot("W43");
    const AffineForm W14 = wslot("W14");
    const AffineForm W15 = wslot("W15");

    std::vector<std::pair<std::string, std::pair<AffineForm, TensorShape>>> forms;
    AffineForm z1 = twoterm_X(tk[0], W2[0], W14, W15);
    forms.push_back({"Z1", {std::move(z1), zshape}});
    double mismatch = tri.internal_mismatch;
    for (int k = 0; k < 4; ++k) {
        AffineForm zk1 = twoterm_Y(tk[k], W1[k], W2[k], W3[k]);
        if (k < 3) {
            // second derivation via equation k+1's X-role
            const AffineForm alt =
                twoterm_X(tk[k + 1], W2[k + 1], lmul(bot, tri.X[k]), rmul(tri.Y[k], right));
            mismatch = std::max(mismatch,
                                (alt.particular() - zk1.particular()).frobenius_norm());
        }
        forms.push_back({"Z" + std::to_string(k + 2), {std::move(zk1), zshape}});
    }
    check_internal(mismatch, out.rhs_scale, "solve_chain_system");
    std::vector<double> substitution;
    for (int k = 0; k < 4; ++k) {
        const QMatrix& zk = forms[static_cast<std::size_t>(k)].second.first.particular();
        const QMatrix& zk1 = forms[static_cast<std::size_t>(k + 1)].second.first.particular();
        substitution.push_back((mat_mul(tk[k].A, mat_mul(zk, tk[k].B)) +
                                mat_mul(tk[k].C, mat_mul(zk1, tk[k].D)) - tk[k].E)
                                   .frobenius_norm());
    }
    check_substitution(substitution, out.rhs_scale, "solve_chain_system");

    finish(out, reg, std::move(forms));
    return out;
}

QTensor instantiate_solution(const GeneralSolution& g,
                             const std::map<std::string, QTensor>& assignment) {
    return g.evaluate(assignment);
}

} // namespace qts
