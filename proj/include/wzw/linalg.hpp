#pragma once

#include "wzw/types.hpp"

namespace wzw::lin {

// Inner-product convention throughout: <u,v>_H = u^H G v with G the Gram
// matrix, conjugate-linear in the first slot.

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// Lower Cholesky factor of a positive-definite Gram matrix.
Mat cholesky(const Mat& gram);

// Eigenvalues of an endomorphism a that is Hermitian with respect to the
// Gram matrix `gram`; computed by whitening with the Cholesky factor,
// returned ascending.
RealVec h_spectrum(const Mat& a, const Mat& gram);

// Whitened representative L^H a L^{-H} of an endomorphism; Loewner order
// with respect to H becomes the ordinary order on these.
Mat whiten_endo(const Mat& a, const Mat& chol_lower);

// Smallest eigenvalue of b - a as H-Hermitian endomorphisms (a <=_H b test).
double loewner_min_eig(const Mat& a, const Mat& b, const Mat& gram);

// Smallest eigenvalue of the Hermitian GRAM difference g1 - g0 whitened by
// g0 (metric comparison H1 >= H0 <=> result >= 0).
double gram_order_min_eig(const Mat& g0, const Mat& g1);

// f applied spectrally to an H-Hermitian endomorphism.
Mat h_matrix_function(const Mat& a, const Mat& gram, double (*f)(double));

// Trace absolute-value norm tr|a| of an arbitrary endomorphism, |a| computed
// with respect to the H-adjoint (nuclear norm of the whitened matrix).
double trace_abs(const Mat& a, const Mat& gram);

// Operator norm of an endomorphism with respect to H.
double op_norm(const Mat& a, const Mat& gram);

// Permanent via Ryser's formula; n <= ~20.
Complex permanent(const Mat& a);

// Column-space basis (orthonormal, std convention) and rank with tolerance.
Mat col_space(const Mat& a, double rel_tol);

// True when every column of sub lies in span(space) within tolerance.
bool contained_in(const Mat& sub, const Mat& space, double tol);

}  // namespace wzw::lin
