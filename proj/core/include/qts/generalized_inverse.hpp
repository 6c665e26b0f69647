#pragma once

#include "qts/tensor.hpp"

namespace qts {

/// Tensor Moore-Penrose inverse: dematricize(mat_pinv(matricize(a))) with
/// swapped mode lists.
QTensor tensor_pinv(const QTensor& a, double tol_rel = 1e-12);

/// L_A = I - A^+ * A over the column modes. Exactly zero when A has full
/// numerical column rank.
QTensor projector_L(const QTensor& a, double tol_rel = 1e-12);

/// R_A = I - A * A^+ over the row modes. Exactly zero when A has full
/// numerical row rank.
QTensor projector_R(const QTensor& a, double tol_rel = 1e-12);

/// Exact inverse for nonsingular square tensors: the pseudoinverse plus an
/// invertibility check ||A * A^+ - I||_F < 1e-8. Throws Singular otherwise.
QTensor tensor_inverse(const QTensor& a, double tol_rel = 1e-12);

/// Matrix-level counterparts used throughout the solver hierarchy.
/// Projectors computed from the pseudoinverse's numerical rank return exact
/// zero matrices in the full-rank case; this keeps exact-arithmetic zeros
/// (e.g. S = C * L_P for full-rank P) from turning into noise with huge
/// pseudoinverses downstream.
QMatrix mat_projector_L(const QMatrix& a, double tol_rel = 1e-12);
QMatrix mat_projector_R(const QMatrix& a, double tol_rel = 1e-12);

} // namespace qts
