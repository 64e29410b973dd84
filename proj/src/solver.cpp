#include "pslra/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pslra/linalg.hpp"

namespace pslra {

void PenaltyConfig::validate() const
{
  auto fail = [](const std::string& what) { throw std::invalid_argument("penalty config: " + what); };
  if (!(lambda_init > 0.0)) fail("lambda_init must be positive");
  if (!(lambda_max >= lambda_init)) fail("lambda_max must be at least lambda_init");
  if (!(growth_modest > 1.0) || !(growth_ambitious > 1.0)) fail("growth factors must exceed 1");
  if (cheap_sweep_threshold < 1) fail("cheap_sweep_threshold must be positive");
  if (!(inner_tol_init > 0.0) || !(inner_tol_floor > 0.0)) fail("inner tolerances must be positive");
  if (!(inner_tol_decay > 0.0 && inner_tol_decay < 1.0)) fail("inner_tol_decay must lie in (0,1)");
  if (max_inner_sweeps < 1 || max_completion_sweeps < 1) fail("sweep limits must be positive");
  if (!(eps_structure > 0.0)) fail("eps_structure must be positive");
}

namespace {

void check_rank(const StructureSpec& spec, Index r)
{
  const Index limit = std::min(spec.rows(), spec.cols());
  if (r < 1 || r >= limit)
    throw DimensionError("rank " + std::to_string(r) + " must satisfy 1 <= r < min(m,n) = " + std::to_string(limit));
}

void check_problem(const StructureSpec& spec, const WeightSpec& weights, const Vector& p)
{
  if (p.size() != spec.num_params())
    throw DimensionError("parameter vector has length " + std::to_string(p.size()) + ", structure has " +
                         std::to_string(spec.num_params()) + " parameters");
  if (weights.size() != spec.num_params())
    throw DimensionError("weights have size " + std::to_string(weights.size()) + ", structure has " +
                         std::to_string(spec.num_params()) + " parameters");
}

// Solves min_x ||M S^+ A x - M p||^2 + lambda ||S_perp^T (A x - vec S0)||^2,
// where A maps the unknowns to vec(PL). Penalty rows go first so that the
// heavily scaled block is eliminated before the weight block.
Vector solve_stacked(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& A,
                     double lambda)
{
  const Index np = spec.num_params();
  const Index nc = spec.complement_dim();
  const double root = std::sqrt(lambda);

  Matrix system(nc + np, A.cols());
  Vector rhs(nc + np);
  if (nc > 0) {
    system.topRows(nc) = root * spec.complement_coordinates(Eigen::Ref<const Matrix>(A));
    rhs.head(nc) = root * spec.complement_coordinates(Eigen::Ref<const Vector>(spec.offset().reshaped()));
  }

  Matrix means(np, A.cols());
  for (Index k = 0; k < np; ++k) {
    const auto& group = spec.groups()[static_cast<std::size_t>(k)];
    means.row(k) = A.row(group[0]);
    for (std::size_t g = 1; g < group.size(); ++g) means.row(k) += A.row(group[g]);
    means.row(k) /= static_cast<double>(group.size());
  }
  system.bottomRows(np) = weights.apply_factor(means);
  rhs.tail(np) = weights.apply_factor(p);
  return linalg::least_squares(system, rhs);
}

double relative_tail_singular_value(const Matrix& X)
{
  const Vector s = linalg::singular_values(X);
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

} // namespace

Factors init_svd(const StructureSpec& spec, const Vector& p, Index r)
{
  check_rank(spec, r);
  const auto svd = linalg::truncated_svd(spec.evaluate(p), r);
  return {svd.U, svd.S.asDiagonal() * svd.V.transpose()};
}

double structure_deviation(const StructureSpec& spec, const Matrix& PL)
{
  const double off = spec.off_structure(PL).squaredNorm();
  const double total = PL.squaredNorm();
  if (total == 0.0) return off == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return off / total;
}

double objective(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Factors& f,
                 double lambda)
{
  check_problem(spec, weights, p);
  const Matrix PL = f.product();
  const double misfit = weights.norm_squared(p - spec.extract_params(PL));
  return lambda == 0.0 ? misfit : misfit + lambda * spec.off_structure(PL).squaredNorm();
}

Matrix update_L(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& P,
                double lambda)
{
  check_problem(spec, weights, p);
  const Index m = spec.rows();
  const Index n = spec.cols();
  const Index r = P.cols();
  if (P.rows() != m) throw DimensionError("update_L: P must have m rows");

  // A = I_n (x) P
  Matrix A = Matrix::Zero(m * n, r * n);
  for (Index j = 0; j < n; ++j) A.block(j * m, j * r, m, r) = P;
  return solve_stacked(spec, weights, p, A, lambda).reshaped(r, n);
}

Matrix update_P(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& L,
                double lambda)
{
  check_problem(spec, weights, p);
  const Index m = spec.rows();
  const Index n = spec.cols();
  const Index r = L.rows();
  if (L.cols() != n) throw DimensionError("update_P: L must have n columns");

  // A = L^T (x) I_m with the unknowns ordered as vec(P^T), so that each cell
  // row touches r consecutive columns.
  Matrix A = Matrix::Zero(m * n, m * r);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) A.block(i + j * m, i * r, 1, r) = L.col(j).transpose();
  return solve_stacked(spec, weights, p, A, lambda).reshaped(r, m).transpose();
}

double objective_noise_floor(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Matrix& PL,
                             double lambda)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return eps * eps * static_cast<double>(spec.num_cells()) *
         (weights.norm_squared(p) + (1.0 + lambda) * PL.squaredNorm());
}

InnerResult solve_fixed_lambda(const StructureSpec& spec, const WeightSpec& weights, const Vector& p,
                               Factors factors, double lambda, double tol, int max_sweeps)
{
  InnerResult out;
  double current = objective(spec, weights, p, factors, lambda);
  out.half_step_objectives.push_back(current);
  while (out.sweeps < max_sweeps) {
    factors.L = update_L(spec, weights, p, factors.P, lambda);
    out.half_step_objectives.push_back(objective(spec, weights, p, factors, lambda));
    factors.P = update_P(spec, weights, p, factors.L, lambda);
    const double next = objective(spec, weights, p, factors, lambda);
    out.half_step_objectives.push_back(next);
    ++out.sweeps;

    const double previous = current;
    current = next;
    if (previous - next <= tol * previous) break;
    // Below the floor, further "decrease" is rounding noise.
    if (next <= objective_noise_floor(spec, weights, p, factors.product(), lambda)) break;
  }
  out.objective = current;
  out.factors = std::move(factors);
  return out;
}

namespace {

void finish_report(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, const Factors& f,
                   double lambda, double eps, SolveReport& report)
{
  const Matrix PL = f.product();
  report.p_hat = spec.extract_params(PL);
  report.weighted_error = weights.norm_squared(p - report.p_hat);
  report.structure_deviation = structure_deviation(spec, PL);
  report.converged = report.structure_deviation < eps;
  report.final_lambda = lambda;
  report.multiplier_estimate = -lambda * spec.off_structure(PL);
  report.rank_deficient_P = relative_tail_singular_value(f.P) < 1e-8;
  report.rank_deficient_L = relative_tail_singular_value(f.L) < 1e-8;
}

} // namespace

std::pair<Factors, SolveReport> solve(const StructureSpec& spec, const WeightSpec& weights, const Vector& p, Index r,
                                      const PenaltyConfig& config, const std::optional<Matrix>& initial_P)
{
  config.validate();
  check_rank(spec, r);
  check_problem(spec, weights, p);

  Factors factors;
  if (initial_P) {
    if (initial_P->rows() != spec.rows() || initial_P->cols() != r)
      throw DimensionError("initial P must be m x r");
    factors.P = *initial_P;
    factors.L = update_L(spec, weights, p, factors.P, config.lambda_init);
  } else {
    factors = init_svd(spec, p, r);
  }

  SolveReport report;
  double lambda = config.lambda_init;
  double tol = config.inner_tol_init;
  double last_lambda = lambda;
  while (lambda <= config.lambda_max) {
    auto inner = solve_fixed_lambda(spec, weights, p, std::move(factors), lambda, tol, config.max_inner_sweeps);
    factors = std::move(inner.factors);
    report.lambda_trace.push_back({lambda, inner.sweeps, inner.objective});
    report.total_sweeps += inner.sweeps;
    report.previous_multiplier_estimate = std::move(report.multiplier_estimate);
    report.multiplier_estimate = -lambda * spec.off_structure(factors.product());

    last_lambda = lambda;
    lambda *= inner.sweeps <= config.cheap_sweep_threshold ? config.growth_ambitious : config.growth_modest;
    tol = std::max(config.inner_tol_decay * tol, config.inner_tol_floor);
  }
  finish_report(spec, weights, p, factors, last_lambda, config.eps_structure, report);
  return {std::move(factors), std::move(report)};
}

std::pair<Factors, SolveReport> completion_solve(const StructureSpec& spec, Index r, const PenaltyConfig& config,
                                                 const std::optional<Vector>& initial_params)
{
  config.validate();
  check_rank(spec, r);
  const Vector p0 = initial_params ? *initial_params : Vector::Zero(spec.num_params());
  const WeightSpec none = WeightSpec::diagonal(Vector::Zero(spec.num_params()));
  check_problem(spec, none, p0);

  // With zero weights lambda only scales the objective.
  auto inner = solve_fixed_lambda(spec, none, p0, init_svd(spec, p0, r), 1.0, config.inner_tol_floor,
                                  config.max_completion_sweeps);
  SolveReport report;
  report.lambda_trace.push_back({1.0, inner.sweeps, inner.objective});
  report.total_sweeps = inner.sweeps;
  finish_report(spec, none, p0, inner.factors, 1.0, config.eps_structure, report);
  return {std::move(inner.factors), std::move(report)};
}

} // namespace pslra
