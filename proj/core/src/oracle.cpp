#include <algorithm>
#include <cmath>
#include <numeric>

#include "qts/errors.hpp"
#include "qts/toolkit.hpp"

// Real-linearization oracle. The system's left-hand side is R-linear in the
// unknowns, so stacking the 4 real coordinates of every unknown entry gives a
// real matrix M with LHS = M x; consistency is decided by the least-squares
// residual min_x ||M x - e||_2, measured independently of the projector
// machinery via pivoted Householder QR.

namespace qts {
namespace {

// Column-major real matrix.
struct RealMat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> d;
    RealMat(std::size_t r, std::size_t c) : rows(r), cols(c), d(r * c, 0.0) {}
    double* col(std::size_t j) { return d.data() + j * rows; }
};

void append_real(std::vector<double>& out, const std::vector<QTensor>& ts) {
    for (const auto& t : ts) {
        for (const auto& q : t.data()) {
            out.push_back(q.w);
            out.push_back(q.x);
            out.push_back(q.y);
            out.push_back(q.z);
        }
    }
}

// Least-squares residual of min ||M x - e|| by Householder QR with column
// pivoting; rank decided at 1e-10 * |R_00| * max(rows, cols).
double least_squares_residual(RealMat& m, std::vector<double>& e) {
    const std::size_t rows = m.rows, cols = m.cols;
    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> colnorm2(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        const double* c = m.col(j);
        for (std::size_t i = 0; i < rows; ++i) colnorm2[j] += c[i] * c[i];
    }

    const std::size_t steps = std::min(rows, cols);
    double r00 = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        // pivot: remaining column with the largest trailing norm
        std::size_t best = k;
        double best_n2 = -1.0;
        for (std::size_t j = k; j < cols; ++j) {
            double n2 = 0.0;
            const double* c = m.col(j);
            for (std::size_t i = k; i < rows; ++i) n2 += c[i] * c[i];
            if (n2 > best_n2) {
                best_n2 = n2;
                best = j;
            }
        }
        if (best != k) {
            std::swap_ranges(m.col(k), m.col(k) + rows, m.col(best));
            std::swap(perm[k], perm[best]);
        }
        double* ck = m.col(k);
        double alpha = std::sqrt(best_n2);
        if (k == 0) r00 = alpha;
        const double thresh = 1e-10 * r00 * static_cast<double>(std::max(rows, cols));
        if (alpha <= thresh || alpha == 0.0) break;
        ++rank;
        if (ck[k] > 0) alpha = -alpha;
        // Householder vector v = x - alpha e_k, stored in place below the diagonal
        ck[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < rows; ++i) vnorm2 += ck[i] * ck[i];
        if (vnorm2 == 0.0) {
            ck[k] = alpha;
            continue;
        }
        for (std::size_t j = k + 1; j < cols; ++j) {
            double* cj = m.col(j);
            double dot = 0.0;
            for (std::size_t i = k; i < rows; ++i) dot += ck[i] * cj[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < rows; ++i) cj[i] -= f * ck[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < rows; ++i) dot += ck[i] * e[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < rows; ++i) e[i] -= f * ck[i];
        ck[k] = alpha;
    }

    double res2 = 0.0;
    for (std::size_t i = rank; i < rows; ++i) res2 += e[i] * e[i];
    return std::sqrt(res2);
}

} // namespace

OracleResult oracle_solve(const Instance& inst, double tol, std::size_t max_real_dim) {
    const auto shapes = unknown_shapes(inst);
    const std::vector<std::string> names = unknown_names(inst.kind);

    std::size_t unknown_entries = 0;
    for (const auto& n : names) {
        const TensorShape& s = shapes.at(n);
        unknown_entries += s.flat_rows() * s.flat_cols();
    }
    const std::size_t real_dim = 4 * unknown_entries;
    if (real_dim > max_real_dim) {
        throw SizeExceeded("oracle_solve: unknowns have real dimension " +
                           std::to_string(real_dim) + " > " + std::to_string(max_real_dim));
    }

    std::vector<double> e;
    append_real(e, inst.rhs);

    std::map<std::string, QTensor> basis;
    for (const auto& n : names) basis.emplace(n, QTensor::zeros(shapes.at(n)));

    RealMat m(e.size(), real_dim);
    std::size_t col = 0;
    for (const auto& n : names) {
        QTensor& t = basis.at(n);
        for (std::size_t idx = 0; idx < t.data().size(); ++idx) {
            for (int comp = 0; comp < 4; ++comp) {
                Quaternion q;
                (comp == 0 ? q.w : comp == 1 ? q.x : comp == 2 ? q.y : q.z) = 1.0;
                t.data()[idx] = q;
                std::vector<double> colv;
                append_real(colv, eval_lhs(inst, basis));
                t.data()[idx] = Quaternion{};
                std::copy(colv.begin(), colv.end(), m.col(col));
                ++col;
            }
        }
    }

    const double escale = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
    const double residual = least_squares_residual(m, e);
    return {residual < tol * (1.0 + escale), residual};
}

} // namespace qts
