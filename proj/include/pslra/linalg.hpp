#pragma once

#include "pslra/types.hpp"

namespace pslra::linalg {

/// Leading r singular triplets, U (m x r), S (r), V (n x r). Each left singular
/// vector is oriented so that its largest-magnitude entry (first one on ties)
/// is nonnegative; V is flipped to match.
struct TruncatedSvd {
  Matrix U;
  Vector S;
  Matrix V;
};

TruncatedSvd truncated_svd(const Matrix& A, Index r);

/// Full singular value spectrum, descending.
Vector singular_values(const Matrix& A);

/// Number of singular values above rel_tol * sigma_1.
Index numerical_rank(const Matrix& A, double rel_tol);

/// Least-squares solution of A x = b; minimum-norm when A is rank deficient.
/// Rows with large scale should come first for the best accuracy.
Vector least_squares(const Matrix& A, const Vector& b);

} // namespace pslra::linalg
