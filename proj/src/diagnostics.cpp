#include "pslra/diagnostics.hpp"

#include <algorithm>

#include "pslra/linalg.hpp"

namespace pslra::diagnostics {

ConstraintVectors constraint_vector(const StructureSpec& spec, const Factors& f)
{
  const Matrix PL = f.product();
  ConstraintVectors out;
  out.c = spec.off_structure(PL);
  const Vector shifted = PL.reshaped() - spec.offset().reshaped();
  out.c_tilde = spec.complement_coordinates(Eigen::Ref<const Vector>(shifted));
  return out;
}

Matrix factor_jacobian(const Matrix& P, const Matrix& L)
{
  const Index m = P.rows();
  const Index r = P.cols();
  const Index n = L.cols();
  if (L.rows() != r) throw DimensionError("factor_jacobian: inner dimensions of P and L differ");
  Matrix K = Matrix::Zero(m * n, m * r + r * n);
  for (Index j = 0; j < n; ++j) {
    // L^T (x) I_m: d vec(PL) / d vec(P)
    for (Index a = 0; a < r; ++a) K.block(j * m, a * m, m, m).diagonal().setConstant(L(a, j));
    // I_n (x) P: d vec(PL) / d vec(L)
    K.block(j * m, m * r + j * r, m, r) = P;
  }
  return K;
}

Index jacobian_rank(const Matrix& J)
{
  if (J.size() == 0) return 0;
  const Vector s = linalg::singular_values(J);
  if (s(0) == 0.0) return 0;
  const double tol = static_cast<double>(std::max(J.rows(), J.cols())) * s(0) * 1e-12;
  return (s.array() > tol).count();
}

JacobianReport constraint_jacobians(const StructureSpec& spec, const Factors& f)
{
  if (spec.num_cells() > kMaxDenseCells)
    throw DimensionError("constraint_jacobians: m*n = " + std::to_string(spec.num_cells()) +
                         " exceeds the dense analysis limit");
  if (f.P.rows() != spec.rows() || f.L.cols() != spec.cols())
    throw DimensionError("constraint_jacobians: factor dimensions do not match the structure");

  JacobianReport out;
  const Matrix K = factor_jacobian(f.P, f.L);
  // Pi_perp acts without the S0 shift: subtract group means, keep fixed cells.
  const Matrix S = spec.basis_matrix();
  out.jacobian.resize(K.rows(), K.cols());
  for (Index col = 0; col < K.cols(); ++col) {
    const Vector v = K.col(col);
    out.jacobian.col(col) = v - S * spec.extract_params(v.reshaped(spec.rows(), spec.cols()));
  }
  out.jacobian_tilde = spec.complement_coordinates(Eigen::Ref<const Matrix>(K));
  out.factor_rank = jacobian_rank(K);
  out.rank = jacobian_rank(out.jacobian);
  out.rank_tilde = jacobian_rank(out.jacobian_tilde);
  return out;
}

RegularityReport regularity_check(Index m, Index n, Index num_params, Index r, std::optional<Index> jacobian_tilde_rank)
{
  RegularityReport out;
  const long long mm = m, nn = n, np = num_params, rr = r;
  out.constraints = mm * nn - np;
  out.degrees = mm * rr + nn * rr - rr * rr;
  out.necessary_condition = out.constraints <= out.degrees;
  out.multiplier_dimension = (mm - rr) * (nn - rr) - np;
  if (jacobian_tilde_rank) out.constant_rank_regime = static_cast<long long>(*jacobian_tilde_rank) == out.degrees;
  return out;
}

RegularityReport regularity_check(const StructureSpec& spec, Index r, std::optional<Index> jacobian_tilde_rank)
{
  return regularity_check(spec.rows(), spec.cols(), spec.num_params(), r, jacobian_tilde_rank);
}

std::string to_string(Stationarity s)
{
  switch (s) {
  case Stationarity::feasible:
    return "feasible";
  case Stationarity::infeasible_stationary:
    return "infeasible-stationary";
  case Stationarity::neither:
    break;
  }
  return "neither";
}

StationarityReport stationarity_report(const StructureSpec& spec, const Factors& f, double lambda, double tol)
{
  StationarityReport out;
  const Vector c = spec.off_structure(f.product());
  const Matrix C = c.reshaped(spec.rows(), spec.cols());
  // grad ||c||^2 = 2 J_c^T c, and Pi_perp c = c
  out.gradient_P = 2.0 * C * f.L.transpose();
  out.gradient_L = 2.0 * f.P.transpose() * C;
  out.c_norm = c.norm();
  out.gradient_norm = std::sqrt(out.gradient_P.squaredNorm() + out.gradient_L.squaredNorm());
  out.multiplier_estimate = -lambda * c;

  const double scale = f.product().norm();
  if (out.c_norm <= tol * scale) {
    out.classification = Stationarity::feasible;
  } else if (out.gradient_norm <= tol * 2.0 * out.c_norm * (f.P.norm() + f.L.norm())) {
    out.classification = Stationarity::infeasible_stationary;
  } else {
    out.classification = Stationarity::neither;
  }
  return out;
}

ConstraintDiagnostics diagnose(const StructureSpec& spec, const Factors& f, double lambda)
{
  ConstraintDiagnostics out;
  auto cv = constraint_vector(spec, f);
  out.c = std::move(cv.c);
  out.c_tilde = std::move(cv.c_tilde);
  if (spec.num_cells() <= kMaxDenseCells) {
    const auto jac = constraint_jacobians(spec, f);
    out.jacobian_rank = jac.rank;
    out.jacobian_tilde_rank = jac.rank_tilde;
  }
  out.regularity = regularity_check(spec, f.rank(), out.jacobian_tilde_rank);
  out.rank_P = linalg::numerical_rank(f.P, 1e-8);
  out.rank_L = linalg::numerical_rank(f.L, 1e-8);
  out.stationarity = stationarity_report(spec, f, lambda);
  return out;
}

} // namespace pslra::diagnostics
