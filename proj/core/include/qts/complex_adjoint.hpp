#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qts/qmatrix.hpp"

namespace qts {

/// Dense complex matrix, row-major. Doubles as the complex adjoint image
/// chi(A) of a quaternion matrix: writing A = A1 + A2*j with A1, A2 complex,
///
///   chi(A) = [  A1        A2      ]
///            [ -conj(A2)  conj(A1)]
///
/// chi is an injective *-homomorphism: chi(AB) = chi(A)chi(B) and
/// chi(A^*) = chi(A)^H, which is what lets the quaternion SVD and
/// pseudoinverse ride on a complex one.
struct ComplexAdjoint {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::complex<double>> data; // row-major

    ComplexAdjoint() = default;
    ComplexAdjoint(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    std::complex<double>& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const std::complex<double>& at(std::size_t i, std::size_t j) const {
        return data[i * cols + j];
    }

    double frobenius_norm() const;
};

ComplexAdjoint to_complex_adjoint(const QMatrix& a);

/// Left inverse of to_complex_adjoint. The input must carry the block
/// symmetry of the invariant to within 1e-10 * ||c||_F; throws
/// StructureViolation otherwise. The two redundant block copies are averaged.
QMatrix from_complex_adjoint(const ComplexAdjoint& c);

} // namespace qts
