#pragma once

#include <optional>
#include <string>

#include "pslra/solver.hpp"

namespace pslra::diagnostics {

/// Penalty vector c = vec(PL - P_S(PL)) (length mn) and its coordinates in the
/// orthonormal complement basis (length mn - n_p). Both have the same norm.
struct ConstraintVectors {
  Vector c;
  Vector c_tilde;
};

ConstraintVectors constraint_vector(const StructureSpec& spec, const Factors& f);

/// Dense [L^T (x) I_m, I_n (x) P] (mn x (mr + nr)), columns ordered vec(P) then vec(L).
Matrix factor_jacobian(const Matrix& P, const Matrix& L);

struct JacobianReport {
  Matrix jacobian;       // Pi_perp [L^T (x) I_m, I_n (x) P]
  Matrix jacobian_tilde; // S_perp^T [L^T (x) I_m, I_n (x) P]
  Index factor_rank = 0; // rank of [L^T (x) I_m, I_n (x) P]
  Index rank = 0;
  Index rank_tilde = 0;
};

/// Largest m*n accepted by constraint_jacobians.
inline constexpr Index kMaxDenseCells = 10000;

/// Numerical rank with threshold max(rows, cols) * sigma_1 * 1e-12.
Index jacobian_rank(const Matrix& J);

/// Dense constraint Jacobians and their ranks. Throws DimensionError when
/// m*n exceeds kMaxDenseCells.
JacobianReport constraint_jacobians(const StructureSpec& spec, const Factors& f);

struct RegularityReport {
  long long constraints = 0; // mn - n_p
  long long degrees = 0;     // mr + nr - r^2
  bool necessary_condition = false;
  /// Dimension of the affine multiplier set, (m - r)(n - r) - n_p.
  long long multiplier_dimension = 0;
  /// Set when a Jacobian rank is supplied: rank_tilde == degrees.
  std::optional<bool> constant_rank_regime;
};

RegularityReport regularity_check(Index m, Index n, Index num_params, Index r,
                                  std::optional<Index> jacobian_tilde_rank = std::nullopt);
RegularityReport regularity_check(const StructureSpec& spec, Index r,
                                  std::optional<Index> jacobian_tilde_rank = std::nullopt);

enum class Stationarity { feasible, infeasible_stationary, neither };

std::string to_string(Stationarity s);

struct StationarityReport {
  double c_norm = 0.0;
  /// Norm of the gradient of ||c||^2 with respect to (P, L).
  double gradient_norm = 0.0;
  Matrix gradient_P;
  Matrix gradient_L;
  Vector multiplier_estimate; // -lambda c
  Stationarity classification = Stationarity::neither;
};

/// Classifies the iterate: feasible when ||c|| <= tol ||PL||_F, otherwise
/// infeasible-stationary when the gradient of ||c||^2 is below tol relative
/// to 2 ||c|| (||P||_F + ||L||_F).
StationarityReport stationarity_report(const StructureSpec& spec, const Factors& f, double lambda,
                                       double tol = 1e-8);

/// Full diagnostic bundle for a solved problem.
struct ConstraintDiagnostics {
  Vector c;
  Vector c_tilde;
  std::optional<Index> jacobian_rank;
  std::optional<Index> jacobian_tilde_rank;
  RegularityReport regularity;
  Index rank_P = 0;
  Index rank_L = 0;
  StationarityReport stationarity;
};

/// Jacobian ranks are skipped for structures larger than kMaxDenseCells.
ConstraintDiagnostics diagnose(const StructureSpec& spec, const Factors& f, double lambda);

} // namespace pslra::diagnostics
