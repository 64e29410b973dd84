#pragma once

#include <vector>

#include "pslra/structure.hpp"

namespace pslra {

///
/// Parameter-space weights W (n_p x n_p, symmetric PSD) with a cached factor
/// M such that M^T M = W, and a missing-data mask.
///
/// Diagonal weights store only the diagonal; the factor is then the
/// elementwise square root. Full weights use the symmetric square root.
///
class WeightSpec {
public:
  static WeightSpec identity(Index n);
  /// Throws WeightError on negative or non-finite entries.
  static WeightSpec diagonal(Vector d);
  /// Throws WeightError if W is not symmetric or has an eigenvalue below -1e-10 ||W||.
  static WeightSpec full(Matrix W);

  Index size() const noexcept { return size_; }
  bool is_diagonal() const noexcept { return diagonal_; }

  /// Diagonal entries (valid for both kinds).
  Vector diagonal_values() const;
  Matrix dense() const;
  /// Dense factor M with M^T M = W.
  Matrix factor() const;

  /// x^T W x.
  double norm_squared(const Vector& x) const;
  /// M x.
  Vector apply_factor(const Vector& x) const;
  /// M X for a matrix with size() rows.
  Matrix apply_factor(const Matrix& X) const;

  const std::vector<bool>& missing_mask() const noexcept { return missing_; }
  bool any_missing() const noexcept;

  /// Zeroes the weights of masked entries and records the mask.
  /// Throws DimensionError on length mismatch and WeightError for full weights.
  WeightSpec with_missing(const std::vector<bool>& mask) const;

private:
  WeightSpec() = default;

  Index size_ = 0;
  bool diagonal_ = true;
  Vector diag_;        // diagonal kind
  Vector diag_sqrt_;   // diagonal kind
  Matrix full_;        // full kind
  Matrix full_factor_; // full kind
  std::vector<bool> missing_;
};

/// Diagonal weights equal to the occurrence counts, so that
/// ||S(p) - S(q)||_F^2 = ||p - q||_W^2.
WeightSpec frobenius_weights(const StructureSpec& spec);

inline WeightSpec with_missing(const WeightSpec& weights, const std::vector<bool>& mask)
{
  return weights.with_missing(mask);
}

inline Matrix factor(const WeightSpec& weights) { return weights.factor(); }

} // namespace pslra
