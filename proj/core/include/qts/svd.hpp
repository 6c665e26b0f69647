#pragma once

#include "qts/complex_adjoint.hpp"

namespace qts {

/// Pseudoinverse of a dense complex matrix by one-sided Jacobi SVD.
/// Singular values sigma <= tol_rel * sigma_max * max(rows, cols) count as
/// zero; `rank` reports how many survive. Throws ConvergenceFailure if the
/// sweep budget is exhausted before column orthogonality is reached.
struct ComplexPinv {
    ComplexAdjoint pinv;
    std::size_t rank = 0;
};
ComplexPinv complex_pinv(const ComplexAdjoint& m, double tol_rel);

} // namespace qts
