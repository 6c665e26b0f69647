#include "qts/complex_adjoint.hpp"

#include <cmath>

#include "qts/errors.hpp"

namespace qts {

double ComplexAdjoint::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data) s += std::norm(z);
    return std::sqrt(s);
}

ComplexAdjoint to_complex_adjoint(const QMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    ComplexAdjoint c(2 * m, 2 * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Quaternion& q = a.at(i, j);
            const std::complex<double> a1(q.w, q.x);
            const std::complex<double> a2(q.y, q.z);
            c.at(i, j) = a1;
            c.at(i, n + j) = a2;
            c.at(m + i, j) = -std::conj(a2);
            c.at(m + i, n + j) = std::conj(a1);
        }
    }
    return c;
}

QMatrix from_complex_adjoint(const ComplexAdjoint& c) {
    if (c.rows % 2 != 0 || c.cols % 2 != 0) {
        throw ShapeMismatch("from_complex_adjoint: dimensions must be even");
    }
    const std::size_t m = c.rows / 2, n = c.cols / 2;
    const double tol = 1e-10 * c.frobenius_norm();
    double defect = 0.0;
    QMatrix out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto c11 = c.at(i, j);
            const auto c12 = c.at(i, n + j);
            const auto c21 = c.at(m + i, j);
            const auto c22 = c.at(m + i, n + j);
            defect = std::max(defect, std::abs(c22 - std::conj(c11)));
            defect = std::max(defect, std::abs(c21 + std::conj(c12)));
            const auto a1 = 0.5 * (c11 + std::conj(c22));
            const auto a2 = 0.5 * (c12 - std::conj(c21));
            out.at(i, j) = Quaternion(a1.real(), a1.imag(), a2.real(), a2.imag());
        }
    }
    if (defect > tol) {
        throw StructureViolation("from_complex_adjoint: block symmetry violated (defect " +
                                 std::to_string(defect) + " > tol " + std::to_string(tol) + ")");
    }
    return out;
}

} // namespace qts
