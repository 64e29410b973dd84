#include "pslra/weighting.hpp"

#include <cmath>
#include <string>

namespace pslra {

WeightSpec WeightSpec::identity(Index n) { return diagonal(Vector::Ones(n)); }

WeightSpec WeightSpec::diagonal(Vector d)
{
  for (Index i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d(i)) || d(i) < 0.0)
      throw WeightError("diagonal weight " + std::to_string(i) + " is negative or not finite");
  }
  WeightSpec w;
  w.size_ = d.size();
  w.diagonal_ = true;
  w.diag_sqrt_ = d.cwiseSqrt();
  w.diag_ = std::move(d);
  w.missing_.assign(static_cast<std::size_t>(w.size_), false);
  return w;
}

WeightSpec WeightSpec::full(Matrix W)
{
  if (W.rows() != W.cols()) throw WeightError("full weight matrix must be square");
  if (!W.allFinite()) throw WeightError("full weight matrix has non-finite entries");
  const double scale = W.norm();
  if ((W - W.transpose()).norm() > 1e-10 * (1.0 + scale)) throw WeightError("full weight matrix is not symmetric");

  const Matrix sym = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector& values = eig.eigenvalues();
  const double tol = 1e-10 * values.cwiseAbs().maxCoeff();
  if (values.size() > 0 && values.minCoeff() < -tol)
    throw WeightError("full weight matrix is not positive semidefinite (eigenvalue " +
                      std::to_string(values.minCoeff()) + ")");

  WeightSpec w;
  w.size_ = W.rows();
  w.diagonal_ = false;
  const Vector root = values.cwiseMax(0.0).cwiseSqrt();
  w.full_factor_ = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  w.full_ = sym;
  w.missing_.assign(static_cast<std::size_t>(w.size_), false);
  return w;
}

Vector WeightSpec::diagonal_values() const { return diagonal_ ? diag_ : Vector(full_.diagonal()); }

Matrix WeightSpec::dense() const { return diagonal_ ? Matrix(diag_.asDiagonal()) : full_; }

Matrix WeightSpec::factor() const { return diagonal_ ? Matrix(diag_sqrt_.asDiagonal()) : full_factor_; }

double WeightSpec::norm_squared(const Vector& x) const
{
  if (x.size() != size_) throw DimensionError("weighted norm: vector length mismatch");
  if (diagonal_) return (diag_.array() * x.array().square()).sum();
  return x.dot(full_ * x);
}

Vector WeightSpec::apply_factor(const Vector& x) const
{
  if (x.size() != size_) throw DimensionError("weight factor: vector length mismatch");
  if (diagonal_) return diag_sqrt_.cwiseProduct(x);
  return full_factor_ * x;
}

Matrix WeightSpec::apply_factor(const Matrix& X) const
{
  if (X.rows() != size_) throw DimensionError("weight factor: row count mismatch");
  if (diagonal_) return diag_sqrt_.asDiagonal() * X;
  return full_factor_ * X;
}

bool WeightSpec::any_missing() const noexcept
{
  for (bool m : missing_)
    if (m) return true;
  return false;
}

WeightSpec WeightSpec::with_missing(const std::vector<bool>& mask) const
{
  if (static_cast<Index>(mask.size()) != size_)
    throw DimensionError("missing mask has length " + std::to_string(mask.size()) + ", expected " +
                         std::to_string(size_));
  if (!diagonal_) throw WeightError("missing-data masks are only supported with diagonal weights");
  Vector d = diag_;
  for (Index i = 0; i < size_; ++i)
    if (mask[static_cast<std::size_t>(i)]) d(i) = 0.0;
  WeightSpec out = diagonal(std::move(d));
  out.missing_ = mask;
  return out;
}

WeightSpec frobenius_weights(const StructureSpec& spec) { return WeightSpec::diagonal(spec.occurrence_counts()); }

} // namespace pslra
