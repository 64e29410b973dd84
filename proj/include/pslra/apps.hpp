#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pslra/solver.hpp"

namespace pslra::apps {

/// Sum of two exponentially modulated cosines, t = 1..T:
/// 0.9^t cos(pi t / 5) + 0.2 * 1.05^t cos(pi t / 12 + pi / 4). Order 4.
Vector true_trajectory(Index T = 50);

struct LtiExperiment {
  Index T = 50;
  Index order = 4;
  Index window = 5;
  Vector y0;
  Vector y;
  double noise_level = 0.2;
  std::optional<Index> missing_stride;
  /// missing[t] marks y(t) as unobserved (every missing_stride-th sample, 1-based).
  std::vector<bool> missing;
  std::uint64_t seed = 0;
};

/// y = y0 + noise_level * e / ||e|| * ||y0|| with standard normal e drawn from
/// a mt19937_64 seeded with `seed`, so that ||y - y0|| = noise_level ||y0||.
LtiExperiment simulate_sysid(std::uint64_t seed, double noise_level = 0.2,
                             std::optional<Index> missing_stride = std::nullopt, Index T = 50);

/// Replaces each missing sample by the mean of its nearest observed neighbours
/// (the single neighbour at either end). Throws DimensionError when nothing is observed.
Vector neighbour_fill(const Vector& y, const std::vector<bool>& missing);

enum class WeightMode { l2, frobenius };

struct Identification {
  /// Unit-norm kernel vector of H_{order+1}(y_hat), last entry nonnegative.
  Vector theta;
  Vector y_hat;
  Vector y_fill;
  /// ||theta^T H_{order+1}(y_hat)||_2.
  double certificate = 0.0;
  Factors factors;
  SolveReport report;
};

/// Hankel structured low-rank approximation of a scalar trajectory with rank
/// `order` and `window` rows. Requires order < window <= T - window + 1.
Identification identify(const Vector& y, const std::vector<bool>& missing, Index order, Index window, WeightMode mode,
                        const PenaltyConfig& config = {});

struct PolySet {
  /// Coefficients in ascending degree.
  std::vector<Vector> polys;
  Index divisor_degree = 1;
};

/// Roots of sum_k a_k z^k from the companion matrix; trailing zero
/// coefficients are dropped first.
std::vector<std::complex<double>> polynomial_roots(const Vector& a);

/// "k*(r1 - z)*(r2 - z)..." with k = a_n (-1)^n.
std::string factored_form(const Vector& a);

struct GcdResult {
  Vector p_hat;
  std::vector<Vector> polys_hat;
  Index rank = 0;
  /// One entry per root cluster holding a root of every polynomial.
  std::vector<std::complex<double>> common_roots;
  /// False when fewer clusters than the divisor degree were found.
  bool divisor_found = false;
  std::vector<std::string> factored;
  /// ||p - p_hat||_2^2.
  double error = 0.0;
  Factors factors;
  SolveReport report;
};

/// Approximate common divisor of the given degree. All polynomials must share
/// one degree n > divisor_degree. The rank target is cols - d for the stacked
/// Sylvester matrix and rows - d for the extended one.
GcdResult gcd_approximate(const PolySet& set, SylvesterVariant variant, const PenaltyConfig& config = {},
                          double cluster_tol = 1e-3);

} // namespace pslra::apps
