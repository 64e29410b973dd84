#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pslra/errors.hpp"
#include "pslra/types.hpp"

namespace pslra {

/// One entry of a structure description: a cell is either bound to a
/// parameter index or holds a fixed value.
struct CellEntry {
  Index row = 0;
  Index col = 0;
  std::optional<Index> param;
  double fixed_value = 0.0;

  static CellEntry parameter(Index row, Index col, Index k) { return {row, col, k, 0.0}; }
  static CellEntry fixed(Index row, Index col, double v) { return {row, col, std::nullopt, v}; }

  friend bool operator==(const CellEntry&, const CellEntry&) = default;
};

/// Unvalidated structure description, as read from a document. Cells that are
/// not listed are fixed at zero.
struct StructureLayout {
  Index rows = 0;
  Index cols = 0;
  Index num_params = 0;
  std::vector<CellEntry> entries;
};

/// Returns every violation found in `layout`; an empty list means the layout
/// can be turned into a StructureSpec.
std::vector<std::string> validate(const StructureLayout& layout);

///
/// Affine matrix structure S(p) = S0 + sum_k S_k p_k in which every cell of the
/// m x n matrix is bound to exactly one parameter or holds a fixed value.
///
/// Because the basis matrices S_k are disjoint 0/1 indicators, the orthogonal
/// projection onto the structured matrices reduces to averaging the cells of
/// each parameter group; no mn x mn operator is ever formed.
///
/// Vectorization follows the column-major convention: cell (i, j) has linear
/// index i + j * rows().
///
class StructureSpec {
public:
  /// Validates `layout`; throws StructureError listing all violations.
  explicit StructureSpec(const StructureLayout& layout);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index num_params() const noexcept { return num_params_; }
  Index num_cells() const noexcept { return rows_ * cols_; }

  /// Parameter bound to the cell with linear index `cell`, or nullopt for a fixed cell.
  std::optional<Index> param_at(Index cell) const;
  /// Fixed value of a cell (0 for parameter cells).
  double fixed_at(Index cell) const { return fixed_(cell); }

  /// Linear cell indices of each parameter group, in column-major order.
  const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }
  /// Linear indices of the fixed cells.
  const std::vector<Index>& fixed_cells() const noexcept { return fixed_cells_; }

  /// The fixed pattern S0.
  Matrix offset() const;

  Matrix evaluate(const Vector& p) const;
  /// Group means of X; the pseudo-inverse of the basis applied to vec(X).
  Vector extract_params(const Matrix& X) const;
  Matrix project(const Matrix& X) const;
  /// vec(X) - vec(project(X)).
  Vector off_structure(const Matrix& X) const;
  /// Number of cells per parameter, the diagonal of the basis Gram matrix.
  Vector occurrence_counts() const;

  /// Number of columns of the orthonormal complement basis, mn - n_p.
  Index complement_dim() const noexcept { return num_cells() - num_params_; }
  /// Coordinates of a vectorized matrix in the complement basis: S_perp^T v.
  /// The basis holds, per group of size t, t-1 Helmert contrasts over the
  /// group's cells, followed by one indicator per fixed cell.
  Vector complement_coordinates(const Eigen::Ref<const Vector>& v) const;
  /// Applies S_perp^T to every column of `V` (rows = mn).
  Matrix complement_coordinates(const Eigen::Ref<const Matrix>& V) const;
  /// Dense S_perp (mn x (mn - n_p)). Analysis and testing only.
  Matrix complement_basis() const;
  /// Dense basis matrix [vec S_1 ... vec S_np]. Analysis and testing only.
  Matrix basis_matrix() const;

  /// Reconstructs a layout listing every parameter cell and every nonzero fixed cell.
  StructureLayout layout() const;

  friend bool operator==(const StructureSpec& a, const StructureSpec& b);

private:
  void check_shape(const Matrix& X) const;

  Index rows_ = 0;
  Index cols_ = 0;
  Index num_params_ = 0;
  std::vector<Index> cell_param_; // -1 for fixed cells
  Vector fixed_;
  std::vector<std::vector<Index>> groups_;
  std::vector<Index> fixed_cells_;
};

std::vector<std::string> validate(const StructureSpec& spec);

/// m x (T - m + 1) Hankel structure with T parameters, cell (i, j) -> p[i + j].
StructureSpec hankel(Index m, Index T);

enum class SylvesterVariant { stacked, extended };

///
/// Generalized Sylvester structure for polynomials of the given degrees.
/// Parameters are the coefficients of all polynomials in ascending degree,
/// concatenated in input order.
///
/// stacked:  [S_k1(a1); S_k2(a2); ...] with k_i = 2N - n_i (N the largest degree),
///           every block having 2N columns.
/// extended: first block row [S_n1(a2) S_n1(a3) ...], then for each j >= 2 a block
///           row holding S_nj(a1) in block column j - 1 and zeros elsewhere.
///
StructureSpec generalized_sylvester(const std::vector<Index>& degrees, SylvesterVariant variant);

} // namespace pslra
