#include "qts/svd.hpp"

#include <algorithm>
#include <cmath>

#include "qts/errors.hpp"

namespace qts {
namespace {

using Cplx = std::complex<double>;

// Column-major working copy so Jacobi rotations touch contiguous memory.
struct ColMat {
    std::size_t rows, cols;
    std::vector<Cplx> d; // column-major

    explicit ColMat(const ComplexAdjoint& m) : rows(m.rows), cols(m.cols), d(m.rows * m.cols) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) d[j * rows + i] = m.at(i, j);
    }
    ColMat(std::size_t r, std::size_t c) : rows(r), cols(c), d(r * c) {}
    Cplx* col(std::size_t j) { return d.data() + j * rows; }
    const Cplx* col(std::size_t j) const { return d.data() + j * rows; }
};

ComplexAdjoint conj_transpose(const ComplexAdjoint& m) {
    ComplexAdjoint out(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out.at(j, i) = std::conj(m.at(i, j));
    return out;
}

constexpr int kMaxSweeps = 60;
constexpr double kOffdiagEps = 1e-15;

// One-sided Jacobi on the columns of w; v accumulates the right rotations.
// Afterwards the columns of w are mutually orthogonal.
void jacobi_orthogonalize(ColMat& w, ColMat& v) {
    const std::size_t m = w.rows, n = w.cols;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Cplx* cp = w.col(p);
                Cplx* cq = w.col(q);
                double app = 0.0, aqq = 0.0;
                Cplx apq{0.0, 0.0};
                for (std::size_t i = 0; i < m; ++i) {
                    app += std::norm(cp[i]);
                    aqq += std::norm(cq[i]);
                    apq += std::conj(cp[i]) * cq[i];
                }
                const double off = std::abs(apq);
                if (off == 0.0 || off <= kOffdiagEps * std::sqrt(app * aqq)) continue;
                converged = false;
                const Cplx phase = apq / off; // e^{i arg(apq)}
                const double tau = (aqq - app) / (2.0 * off);
                const double t =
                    tau == 0.0 ? 1.0
                               : (tau > 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const Cplx sp = s * phase;
                const Cplx spc = s * std::conj(phase);
                for (std::size_t i = 0; i < m; ++i) {
                    const Cplx wp = cp[i], wq = cq[i];
                    cp[i] = c * wp - spc * wq;
                    cq[i] = sp * wp + c * wq;
                }
                Cplx* vp = v.col(p);
                Cplx* vq = v.col(q);
                for (std::size_t i = 0; i < v.rows; ++i) {
                    const Cplx a = vp[i], b = vq[i];
                    vp[i] = c * a - spc * b;
                    vq[i] = sp * a + c * b;
                }
            }
        }
    }
    if (!converged) {
        throw ConvergenceFailure("complex_pinv: Jacobi SVD did not converge within sweep budget");
    }
}

ComplexPinv pinv_tall(const ComplexAdjoint& m, double tol_rel) {
    const std::size_t rows = m.rows, cols = m.cols;
    ColMat w(m);
    ColMat v(cols, cols);
    for (std::size_t j = 0; j < cols; ++j) v.col(j)[j] = 1.0;

    jacobi_orthogonalize(w, v);

    std::vector<double> sigma(cols, 0.0);
    double smax = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        double s2 = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s2 += std::norm(w.col(j)[i]);
        sigma[j] = std::sqrt(s2);
        smax = std::max(smax, sigma[j]);
    }
    const double cutoff = tol_rel * smax * static_cast<double>(std::max(rows, cols));

    // pinv = sum over kept columns of v_k (1/sigma_k) u_k^H, u_k = w_k / sigma_k
    ComplexPinv out;
    out.pinv = ComplexAdjoint(cols, rows);
    for (std::size_t k = 0; k < cols; ++k) {
        if (sigma[k] <= cutoff || sigma[k] == 0.0) continue;
        ++out.rank;
        const double inv_s2 = 1.0 / (sigma[k] * sigma[k]);
        const Cplx* uk = w.col(k);
        const Cplx* vk = v.col(k);
        for (std::size_t i = 0; i < cols; ++i) {
            const Cplx vi = vk[i] * inv_s2;
            Cplx* row = out.pinv.data.data() + i * rows;
            for (std::size_t j = 0; j < rows; ++j) row[j] += vi * std::conj(uk[j]);
        }
    }
    return out;
}

} // namespace

ComplexPinv complex_pinv(const ComplexAdjoint& m, double tol_rel) {
    if (m.rows == 0 || m.cols == 0) {
        return {ComplexAdjoint(m.cols, m.rows), 0};
    }
    if (m.rows >= m.cols) {
        return pinv_tall(m, tol_rel);
    }
    ComplexPinv t = pinv_tall(conj_transpose(m), tol_rel);
    return {conj_transpose(t.pinv), t.rank};
}

} // namespace qts
