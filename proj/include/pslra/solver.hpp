#pragma once

#include <optional>
#include <vector>

#include "pslra/structure.hpp"
#include "pslra/weighting.hpp"

namespace pslra {

/// Image representation D = P L of a rank-r approximation.
struct Factors {
  Matrix P; // m x r
  Matrix L; // r x n

  Index rank() const noexcept { return P.cols(); }
  Matrix product() const { return P * L; }
};

/// Penalty continuation schedule and tolerances.
struct PenaltyConfig {
  double lambda_init = 1.0;
  double growth_modest = 1.5;
  double growth_ambitious = 10.0;
  /// Inner solves finishing within this many sweeps count as cheap.
  int cheap_sweep_threshold = 5;
  double lambda_max = 1e14;
  double inner_tol_init = 1e-5;
  double inner_tol_decay = 0.5;
  double inner_tol_floor = 1e-12;
  int max_inner_sweeps = 200;
  /// Relative structure deviation below which P L counts as structured.
  double eps_structure = 1e-12;
  /// Sweep cap for completion_solve, which has no penalty continuation.
  int max_completion_sweeps = 20000;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

struct LambdaStep {
  double lambda = 0.0;
  int sweeps = 0;
  double objective = 0.0;
};

struct SolveReport {
  Vector p_hat;
  double weighted_error = 0.0;
  double structure_deviation = 0.0;
  std::vector<LambdaStep> lambda_trace;
  int total_sweeps = 0;
  bool converged = false;
  /// -lambda * c at the final iterate (length m*n).
  Vector multiplier_estimate;
  /// -lambda * c at the end of the second-to-last continuation step (empty if none).
  Vector previous_multiplier_estimate;
  double final_lambda = 0.0;
  /// sigma_r / sigma_1 of P and L fell below 1e-8.
  bool rank_deficient_P = false;
  bool rank_deficient_L = false;
};

/// P = U_r, L = Sigma_r V_r^T from the truncated SVD of S(p).
Factors init_svd(const StructureSpec& spec, const Vector& p, Index r);

/// ||p - S^+ vec(PL)||_W^2 + lambda ||off_structure(PL)||^2.
double objective(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Factors& f,
                 double lambda);

/// ||PL - P_S(PL)||_F^2 / ||PL||_F^2 (0 when PL = 0 and S0 = 0).
double structure_deviation(const StructureSpec& spec, const Matrix& PL);

/// Exact minimizer over L for fixed P of the penalized objective.
Matrix update_L(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& P,
                double lambda);

/// Exact minimizer over P for fixed L of the penalized objective.
Matrix update_P(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& L,
                double lambda);

struct InnerResult {
  Factors factors;
  int sweeps = 0;
  double objective = 0.0;
  /// Objective after every half-step, starting with the initial value.
  std::vector<double> half_step_objectives;
};

/// Rounding level of the objective: eps^2 mn (||p||_W^2 + (1 + lambda) ||PL||_F^2).
double objective_noise_floor(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& PL,
                             double lambda);

/// Alternates update_L / update_P until the relative objective decrease of a
/// sweep drops below `tol`, the objective falls below its noise floor, or
/// `max_sweeps` sweeps have run.
InnerResult solve_fixed_lambda(const StructureSpec& spec, const WeightSpec& weights, const Vector& p,
                               Factors factors, double lambda, double tol, int max_sweeps);

/// Penalized structured low-rank approximation with lambda continuation.
/// When `initial_P` is absent, P starts from the truncated SVD of S(p).
std::pair<Factors, SolveReport> solve(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, Index r,
                                      const PenaltyConfig& config = {},
                                      const std::optional<Matrix>& initial_P = std::nullopt);

/// Structured completion with all known data held in the fixed cells:
/// minimizes ||PL - P_S(PL)||_F^2 alone. `initial_params` seeds the free
/// parameters (zeros when absent) for the SVD start.
std::pair<Factors, SolveReport> completion_solve(const StructureSpec& spec, Index r, const PenaltyConfig& config = {},
                                                 const std::optional<Vector>& initial_params = std::nullopt);

} // namespace pslra
