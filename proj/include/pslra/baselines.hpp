#pragma once

#include <vector>

#include "pslra/structure.hpp"

namespace pslra::baselines {

struct BaselineReport {
  Vector p_hat;
  /// ||S(p) - S(p_hat)||_F^2.
  double frobenius_error = 0.0;
  /// Numerical rank of S(p_hat) at 1e-8 sigma_1; may exceed the target.
  Index achieved_rank = 0;
  int iterations = 0;
  bool converged = false;
  /// ||D_struct - D_lowrank||_F after every half-step (low-rank, then structure).
  std::vector<double> gap_trace;
};

/// Cadzow's alternating projections (truncated SVD, then structure projection),
/// unweighted. Stops when ||p_k - p_{k-1}|| <= tol (1 + ||p_k||) or after max_iter.
BaselineReport cadzow(const StructureSpec& spec, const Vector& p, Index r, int max_iter = 1000, double tol = 1e-12);

struct KungResult {
  /// Monic characteristic polynomial of the realized state matrix,
  /// ascending coefficients (theta_0, ..., theta_{l-1}, 1).
  Vector theta;
  Vector y_hat;
  Matrix A;
  Vector C;
  Vector x1;
};

/// Balanced square-root realization from the rank-l SVD of H_m(y).
/// Requires l < m <= T - l; throws DimensionError otherwise.
KungResult kung(const Vector& y, Index order, Index window);

} // namespace pslra::baselines
