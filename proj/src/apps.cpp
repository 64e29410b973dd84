#include "pslra/apps.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "pslra/linalg.hpp"

namespace pslra::apps {

Vector true_trajectory(Index T)
{
  Vector y(T);
  for (Index i = 0; i < T; ++i) {
    const double t = static_cast<double>(i + 1);
    y(i) = std::pow(0.9, t) * std::cos(std::numbers::pi * t / 5.0) +
           0.2 * std::pow(1.05, t) * std::cos(std::numbers::pi * t / 12.0 + std::numbers::pi / 4.0);
  }
  return y;
}

LtiExperiment simulate_sysid(std::uint64_t seed, double noise_level, std::optional<Index> missing_stride, Index T)
{
  if (T < 2) throw DimensionError("simulate_sysid: horizon must be at least 2");
  if (missing_stride && *missing_stride < 2) throw DimensionError("simulate_sysid: missing stride must be at least 2");

  LtiExperiment ex;
  ex.T = T;
  ex.seed = seed;
  ex.noise_level = noise_level;
  ex.missing_stride = missing_stride;
  ex.y0 = true_trajectory(T);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector e(T);
  for (Index t = 0; t < T; ++t) e(t) = normal(rng);
  ex.y = ex.y0 + noise_level * (e / e.norm()) * ex.y0.norm();

  ex.missing.assign(static_cast<std::size_t>(T), false);
  if (missing_stride)
    for (Index t = *missing_stride - 1; t < T; t += *missing_stride) ex.missing[static_cast<std::size_t>(t)] = true;
  return ex;
}

Vector neighbour_fill(const Vector& y, const std::vector<bool>& missing)
{
  const Index T = y.size();
  if (static_cast<Index>(missing.size()) != T) throw DimensionError("missing mask length does not match the trajectory");
  auto present = [&](Index t) { return !missing[static_cast<std::size_t>(t)]; };

  Vector out = y;
  bool any = false;
  for (Index t = 0; t < T; ++t) any = any || present(t);
  if (!any) throw DimensionError("trajectory has no observed samples");

  for (Index t = 0; t < T; ++t) {
    if (present(t)) continue;
    Index left = t - 1;
    while (left >= 0 && !present(left)) --left;
    Index right = t + 1;
    while (right < T && !present(right)) ++right;
    if (left >= 0 && right < T)
      out(t) = 0.5 * (y(left) + y(right));
    else
      out(t) = left >= 0 ? y(left) : y(right);
  }
  return out;
}

Identification identify(const Vector& y, const std::vector<bool>& missing, Index order, Index window, WeightMode mode,
                        const PenaltyConfig& config)
{
  const Index T = y.size();
  if (order < 1) throw DimensionError("identify: order must be at least 1");
  if (!(order < window && window <= T - window + 1))
    throw DimensionError("identify: window " + std::to_string(window) +
                         " must satisfy order < window <= T - window + 1 (T = " + std::to_string(T) + ")");

  Identification out;
  out.y_fill = neighbour_fill(y, missing);

  const StructureSpec spec = hankel(window, T);
  WeightSpec weights = mode == WeightMode::frobenius ? frobenius_weights(spec) : WeightSpec::identity(T);
  weights = weights.with_missing(missing);

  auto [factors, report] = solve(spec, weights, out.y_fill, order, config);
  out.factors = std::move(factors);
  out.y_hat = report.p_hat;
  out.report = std::move(report);

  const Matrix H = hankel(order + 1, T).evaluate(out.y_hat);
  Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeFullU);
  out.theta = svd.matrixU().col(order);
  if (out.theta(order) < 0.0) out.theta = -out.theta;
  out.certificate = (out.theta.transpose() * H).norm();
  return out;
}

std::vector<std::complex<double>> polynomial_roots(const Vector& a)
{
  Index n = a.size() - 1;
  while (n >= 0 && a(n) == 0.0) --n;
  if (n < 0) throw DimensionError("polynomial_roots: zero polynomial");
  std::vector<std::complex<double>> roots;
  if (n == 0) return roots;

  Matrix companion = Matrix::Zero(n, n);
  companion.bottomLeftCorner(n - 1, n - 1).setIdentity();
  companion.col(n - 1) = -a.head(n) / a(n);
  const Eigen::VectorXcd eig = companion.eigenvalues();
  roots.assign(eig.data(), eig.data() + eig.size());
  return roots;
}

namespace {

std::string format_number(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string format_root(std::complex<double> z)
{
  if (z.imag() == 0.0) return format_number(z.real());
  return "(" + format_number(z.real()) + (z.imag() < 0.0 ? " - " : " + ") + format_number(std::abs(z.imag())) + "i)";
}

} // namespace

std::string factored_form(const Vector& a)
{
  const auto roots = polynomial_roots(a);
  const Index n = static_cast<Index>(roots.size());
  const double k = a(n) * (n % 2 == 0 ? 1.0 : -1.0);
  std::string out = format_number(k);
  for (const auto& z : roots) out += "*(" + format_root(z) + " - z)";
  return out;
}

GcdResult gcd_approximate(const PolySet& set, SylvesterVariant variant, const PenaltyConfig& config, double cluster_tol)
{
  if (set.polys.size() < 2) throw DimensionError("gcd: need at least two polynomials");
  const Index n = set.polys.front().size() - 1;
  std::vector<Index> degrees;
  Index np = 0;
  for (const auto& a : set.polys) {
    if (a.size() - 1 != n) throw DimensionError("gcd: all polynomials must have the same degree");
    if (a.cwiseAbs().maxCoeff() == 0.0) throw DimensionError("gcd: zero polynomial");
    degrees.push_back(n);
    np += a.size();
  }
  const Index d = set.divisor_degree;
  if (d < 1 || d >= n)
    throw DimensionError("gcd: divisor degree " + std::to_string(d) + " must satisfy 1 <= d < " + std::to_string(n));

  Vector p(np);
  Index offset = 0;
  for (const auto& a : set.polys) {
    p.segment(offset, a.size()) = a;
    offset += a.size();
  }

  const StructureSpec spec = generalized_sylvester(degrees, variant);
  GcdResult out;
  out.rank = variant == SylvesterVariant::stacked ? spec.cols() - d : spec.rows() - d;
  auto [factors, report] = solve(spec, WeightSpec::identity(np), p, out.rank, config);
  out.factors = std::move(factors);
  out.p_hat = report.p_hat;
  out.error = (p - out.p_hat).squaredNorm();
  out.report = std::move(report);

  offset = 0;
  for (const auto& a : set.polys) {
    out.polys_hat.push_back(out.p_hat.segment(offset, a.size()));
    offset += a.size();
  }
  for (const auto& a : out.polys_hat) out.factored.push_back(factored_form(a));

  // A cluster is a root of the first polynomial with a root of every other
  // polynomial within cluster_tol; each root joins at most one cluster.
  std::vector<std::vector<std::complex<double>>> roots;
  for (const auto& a : out.polys_hat) roots.push_back(polynomial_roots(a));
  std::vector<std::vector<bool>> used;
  for (const auto& r : roots) used.emplace_back(r.size(), false);
  for (const auto& z : roots[0]) {
    std::complex<double> sum = z;
    std::vector<std::size_t> picks;
    for (std::size_t j = 1; j < roots.size(); ++j) {
      std::size_t best = roots[j].size();
      double best_dist = cluster_tol;
      for (std::size_t k = 0; k < roots[j].size(); ++k) {
        const double dist = std::abs(roots[j][k] - z);
        if (!used[j][k] && dist <= best_dist) {
          best = k;
          best_dist = dist;
        }
      }
      if (best == roots[j].size()) break;
      picks.push_back(best);
      sum += roots[j][best];
    }
    if (picks.size() + 1 != roots.size()) continue;
    for (std::size_t j = 1; j < roots.size(); ++j) used[j][picks[j - 1]] = true;
    out.common_roots.push_back(sum / static_cast<double>(roots.size()));
  }
  out.divisor_found = static_cast<Index>(out.common_roots.size()) >= d;
  return out;
}

} // namespace pslra::apps
