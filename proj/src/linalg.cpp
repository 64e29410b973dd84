#include "pslra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>
#include <limits>

#include "pslra/errors.hpp"

namespace pslra::linalg {

TruncatedSvd truncated_svd(const Matrix& A, Index r)
{
  if (r < 0 || r > std::min(A.rows(), A.cols())) throw DimensionError("truncated_svd: rank out of range");
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out{svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r)};
  for (Index k = 0; k < r; ++k) {
    Index imax = 0;
    double best = -1.0;
    for (Index i = 0; i < out.U.rows(); ++i) {
      if (std::abs(out.U(i, k)) > best) {
        best = std::abs(out.U(i, k));
        imax = i;
      }
    }
    if (out.U(imax, k) < 0.0) {
      out.U.col(k) *= -1.0;
      out.V.col(k) *= -1.0;
    }
  }
  return out;
}

Vector singular_values(const Matrix& A)
{
  if (A.size() == 0) return Vector();
  return Eigen::BDCSVD<Matrix>(A).singularValues();
}

Index numerical_rank(const Matrix& A, double rel_tol)
{
  const Vector s = singular_values(A);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

namespace {

// Householder QR restricted to the envelope of A: rows are sorted by their
// first nonzero column, and the reflection for column c only touches the rows
// that have become active and the columns they can reach. Returns nullopt when
// a diagonal entry of R is negligible.
std::optional<Vector> envelope_least_squares(const Matrix& A, const Vector& b)
{
  const Index M = A.rows();
  const Index N = A.cols();
  std::vector<Index> first(static_cast<std::size_t>(M), N);
  std::vector<Index> last(static_cast<std::size_t>(M), -1);
  for (Index j = 0; j < N; ++j) {
    for (Index i = 0; i < M; ++i) {
      if (A(i, j) != 0.0) {
        auto& f = first[static_cast<std::size_t>(i)];
        if (f == N) f = j;
        last[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) {
    return first[static_cast<std::size_t>(a)] < first[static_cast<std::size_t>(c)];
  });

  Matrix R(M, N);
  Vector rhs(M);
  for (Index i = 0; i < M; ++i) {
    R.row(i) = A.row(order[static_cast<std::size_t>(i)]);
    rhs(i) = b(order[static_cast<std::size_t>(i)]);
  }

  Index active_end = 0;
  Index fill_end = 0;
  Vector workspace(N);
  double max_diag = 0.0;
  for (Index c = 0; c < N; ++c) {
    while (active_end < M && first[static_cast<std::size_t>(order[static_cast<std::size_t>(active_end)])] <= c) {
      fill_end = std::max(fill_end, last[static_cast<std::size_t>(order[static_cast<std::size_t>(active_end)])] + 1);
      ++active_end;
    }
    if (active_end <= c) return std::nullopt;
    const Index height = active_end - c;
    double tau = 0.0;
    double beta = 0.0;
    auto column = R.col(c).segment(c, height);
    Vector essential(height > 1 ? height - 1 : 0);
    column.makeHouseholder(essential, tau, beta);
    R(c, c) = beta;
    column.tail(height - 1).setZero();
    if (fill_end > c + 1) {
      R.block(c, c + 1, height, fill_end - c - 1).applyHouseholderOnTheLeft(essential, tau, workspace.data());
    }
    rhs.segment(c, height).applyHouseholderOnTheLeft(essential, tau, workspace.data());
    max_diag = std::max(max_diag, std::abs(beta));
  }

  const double cutoff = 1e3 * std::numeric_limits<double>::epsilon() * static_cast<double>(M) * max_diag;
  if (max_diag == 0.0 || R.diagonal().head(N).cwiseAbs().minCoeff() <= cutoff) return std::nullopt;
  return Vector(R.topRows(N).triangularView<Eigen::Upper>().solve(rhs.head(N)));
}

} // namespace

Vector least_squares(const Matrix& A, const Vector& b)
{
  if (A.rows() != b.size()) throw DimensionError("least_squares: row count mismatch");
  if (A.cols() == 0) return Vector();
  if (A.rows() >= A.cols()) {
    if (auto x = envelope_least_squares(A, b)) return *x;
  }
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(A).solve(b);
}

} // namespace pslra::linalg
