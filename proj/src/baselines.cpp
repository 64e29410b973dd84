#include "pslra/baselines.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "pslra/linalg.hpp"

namespace pslra::baselines {

BaselineReport cadzow(const StructureSpec& spec, const Vector& p, Index r, int max_iter, double tol)
{
  const Index limit = std::min(spec.rows(), spec.cols());
  if (r < 1 || r >= limit)
    throw DimensionError("rank " + std::to_string(r) + " must satisfy 1 <= r < min(m,n) = " + std::to_string(limit));
  if (p.size() != spec.num_params()) throw DimensionError("parameter vector length does not match the structure");
  if (max_iter < 1) throw std::invalid_argument("cadzow: max_iter must be positive");

  BaselineReport out;
  Vector current = p;
  Matrix D = spec.evaluate(current);
  while (out.iterations < max_iter) {
    const auto svd = linalg::truncated_svd(D, r);
    const Matrix low = svd.U * svd.S.asDiagonal() * svd.V.transpose();
    out.gap_trace.push_back((D - low).norm());
    const Vector next = spec.extract_params(low);
    D = spec.evaluate(next);
    out.gap_trace.push_back((D - low).norm());
    ++out.iterations;
    const double change = (next - current).norm();
    current = next;
    if (change <= tol * (1.0 + current.norm())) {
      out.converged = true;
      break;
    }
  }
  out.p_hat = current;
  out.frobenius_error = (spec.evaluate(p) - D).squaredNorm();
  out.achieved_rank = linalg::numerical_rank(D, 1e-8);
  return out;
}

KungResult kung(const Vector& y, Index order, Index window)
{
  const Index T = y.size();
  if (order < 1) throw DimensionError("kung: order must be at least 1");
  if (!(order < window && window <= T - order))
    throw DimensionError("kung: window " + std::to_string(window) + " must satisfy order < window <= T - order (T = " +
                         std::to_string(T) + ", order = " + std::to_string(order) + ")");

  const Matrix H = hankel(window, T).evaluate(y);
  const auto svd = linalg::truncated_svd(H, order);
  const Vector root = svd.S.cwiseSqrt();
  const Matrix O = svd.U * root.asDiagonal();
  const Matrix X = root.asDiagonal() * svd.V.transpose();

  KungResult out;
  // Shift invariance: O(1:end-1, :) A = O(2:end, :).
  out.A = Eigen::CompleteOrthogonalDecomposition<Matrix>(O.topRows(window - 1)).solve(O.bottomRows(window - 1));
  out.C = O.row(0).transpose();
  out.x1 = X.col(0);

  out.y_hat.resize(T);
  Vector state = out.x1;
  for (Index t = 0; t < T; ++t) {
    out.y_hat(t) = out.C.dot(state);
    state = out.A * state;
  }

  // Expand prod (z - lambda_i); conjugate pairs keep the result real.
  const Eigen::VectorXcd eig = out.A.eigenvalues();
  Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(order + 1);
  poly(0) = 1.0;
  for (Index i = 0; i < order; ++i) {
    for (Index k = i + 1; k > 0; --k) poly(k) = poly(k - 1) - eig(i) * poly(k);
    poly(0) = -eig(i) * poly(0);
  }
  out.theta = poly.real();
  return out;
}

} // namespace pslra::baselines
