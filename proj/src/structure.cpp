#include "pslra/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pslra {

StructureError::StructureError(std::vector<std::string> violations)
  : std::invalid_argument([&] {
      std::ostringstream msg;
      msg << "invalid structure";
      for (const auto& v : violations) msg << "; " << v;
      return msg.str();
    }())
  , violations_(std::move(violations))
{
}

std::vector<std::string> validate(const StructureLayout& layout)
{
  std::vector<std::string> out;
  if (layout.rows <= 0 || layout.cols <= 0) {
    out.push_back("matrix dimensions must be positive");
    return out;
  }
  if (layout.num_params <= 0) out.push_back("num_params must be positive");
  if (layout.num_params > layout.rows * layout.cols) out.push_back("num_params exceeds m*n");

  const Index cells = layout.rows * layout.cols;
  std::vector<char> seen(static_cast<std::size_t>(cells), 0);
  std::vector<char> used(static_cast<std::size_t>(std::max<Index>(layout.num_params, 0)), 0);
  for (std::size_t e = 0; e < layout.entries.size(); ++e) {
    const auto& entry = layout.entries[e];
    if (entry.row < 0 || entry.row >= layout.rows || entry.col < 0 || entry.col >= layout.cols) {
      std::ostringstream msg;
      msg << "entry " << e << ": cell (" << entry.row << "," << entry.col << ") out of range";
      out.push_back(msg.str());
      continue;
    }
    const auto cell = static_cast<std::size_t>(entry.row + entry.col * layout.rows);
    if (seen[cell]) {
      std::ostringstream msg;
      msg << "cell (" << entry.row << "," << entry.col << ") assigned more than once";
      out.push_back(msg.str());
    }
    seen[cell] = 1;
    if (entry.param) {
      const Index k = *entry.param;
      if (k < 0 || k >= layout.num_params) {
        std::ostringstream msg;
        msg << "entry " << e << ": parameter index " << k << " out of range";
        out.push_back(msg.str());
      } else {
        used[static_cast<std::size_t>(k)] = 1;
      }
    } else if (!std::isfinite(entry.fixed_value)) {
      std::ostringstream msg;
      msg << "entry " << e << ": fixed value is not finite";
      out.push_back(msg.str());
    }
  }
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) out.push_back("parameter " + std::to_string(k) + " unused");
  }
  return out;
}

std::vector<std::string> validate(const StructureSpec& spec) { return validate(spec.layout()); }

StructureSpec::StructureSpec(const StructureLayout& layout)
{
  if (auto violations = validate(layout); !violations.empty()) throw StructureError(std::move(violations));

  rows_ = layout.rows;
  cols_ = layout.cols;
  num_params_ = layout.num_params;
  cell_param_.assign(static_cast<std::size_t>(num_cells()), -1);
  fixed_ = Vector::Zero(num_cells());
  for (const auto& entry : layout.entries) {
    const Index cell = entry.row + entry.col * rows_;
    if (entry.param) {
      cell_param_[static_cast<std::size_t>(cell)] = *entry.param;
    } else {
      fixed_(cell) = entry.fixed_value;
    }
  }
  groups_.assign(static_cast<std::size_t>(num_params_), {});
  for (Index cell = 0; cell < num_cells(); ++cell) {
    const Index k = cell_param_[static_cast<std::size_t>(cell)];
    if (k >= 0) {
      groups_[static_cast<std::size_t>(k)].push_back(cell);
    } else {
      fixed_cells_.push_back(cell);
    }
  }
}

std::optional<Index> StructureSpec::param_at(Index cell) const
{
  const Index k = cell_param_.at(static_cast<std::size_t>(cell));
  if (k < 0) return std::nullopt;
  return k;
}

Matrix StructureSpec::offset() const { return fixed_.reshaped(rows_, cols_); }

void StructureSpec::check_shape(const Matrix& X) const
{
  if (X.rows() != rows_ || X.cols() != cols_) {
    std::ostringstream msg;
    msg << "matrix is " << X.rows() << "x" << X.cols() << ", structure expects " << rows_ << "x" << cols_;
    throw DimensionError(msg.str());
  }
}

Matrix StructureSpec::evaluate(const Vector& p) const
{
  if (p.size() != num_params_) {
    throw DimensionError("parameter vector has length " + std::to_string(p.size()) + ", expected " +
                         std::to_string(num_params_));
  }
  Matrix D(rows_, cols_);
  auto d = D.reshaped();
  for (Index cell = 0; cell < num_cells(); ++cell) {
    const Index k = cell_param_[static_cast<std::size_t>(cell)];
    d(cell) = k >= 0 ? p(k) : fixed_(cell);
  }
  return D;
}

Vector StructureSpec::extract_params(const Matrix& X) const
{
  check_shape(X);
  const auto x = X.reshaped();
  Vector p(num_params_);
  for (Index k = 0; k < num_params_; ++k) {
    const auto& group = groups_[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (Index cell : group) sum += x(cell);
    p(k) = sum / static_cast<double>(group.size());
  }
  return p;
}

Matrix StructureSpec::project(const Matrix& X) const { return evaluate(extract_params(X)); }

Vector StructureSpec::off_structure(const Matrix& X) const
{
  check_shape(X);
  Vector c = X.reshaped();
  for (const auto& group : groups_) {
    double mean = 0.0;
    for (Index cell : group) mean += c(cell);
    mean /= static_cast<double>(group.size());
    for (Index cell : group) c(cell) -= mean;
  }
  for (Index cell : fixed_cells_) c(cell) -= fixed_(cell);
  return c;
}

Vector StructureSpec::occurrence_counts() const
{
  Vector counts(num_params_);
  for (Index k = 0; k < num_params_; ++k) counts(k) = static_cast<double>(groups_[static_cast<std::size_t>(k)].size());
  return counts;
}

Matrix StructureSpec::complement_coordinates(const Eigen::Ref<const Matrix>& V) const
{
  if (V.rows() != num_cells()) throw DimensionError("complement_coordinates: row count must equal m*n");
  Matrix out(complement_dim(), V.cols());
  Eigen::RowVectorXd prefix(V.cols());
  Index row = 0;
  for (const auto& group : groups_) {
    // Helmert contrasts: (sum_{i<s} v_i - s v_s) / sqrt(s (s + 1)), s = 1..t-1
    prefix = V.row(group[0]);
    for (std::size_t s = 1; s < group.size(); ++s) {
      const double sd = static_cast<double>(s);
      out.row(row++) = (prefix - sd * V.row(group[s])) / std::sqrt(sd * (sd + 1.0));
      prefix += V.row(group[s]);
    }
  }
  for (Index cell : fixed_cells_) out.row(row++) = V.row(cell);
  return out;
}

Vector StructureSpec::complement_coordinates(const Eigen::Ref<const Vector>& v) const
{
  return complement_coordinates(Eigen::Ref<const Matrix>(v));
}

Matrix StructureSpec::complement_basis() const
{
  const Matrix identity = Matrix::Identity(num_cells(), num_cells());
  return complement_coordinates(Eigen::Ref<const Matrix>(identity)).transpose();
}

Matrix StructureSpec::basis_matrix() const
{
  Matrix S = Matrix::Zero(num_cells(), num_params_);
  for (Index k = 0; k < num_params_; ++k) {
    for (Index cell : groups_[static_cast<std::size_t>(k)]) S(cell, k) = 1.0;
  }
  return S;
}

StructureLayout StructureSpec::layout() const
{
  StructureLayout layout{rows_, cols_, num_params_, {}};
  for (Index cell = 0; cell < num_cells(); ++cell) {
    const Index i = cell % rows_;
    const Index j = cell / rows_;
    const Index k = cell_param_[static_cast<std::size_t>(cell)];
    if (k >= 0) {
      layout.entries.push_back(CellEntry::parameter(i, j, k));
    } else if (fixed_(cell) != 0.0) {
      layout.entries.push_back(CellEntry::fixed(i, j, fixed_(cell)));
    }
  }
  return layout;
}

bool operator==(const StructureSpec& a, const StructureSpec& b)
{
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.num_params_ == b.num_params_ &&
         a.cell_param_ == b.cell_param_ && a.fixed_ == b.fixed_;
}

StructureSpec hankel(Index m, Index T)
{
  if (m <= 0 || T <= 0) throw DimensionError("hankel: m and T must be positive");
  if (m > T) throw DimensionError("hankel: m = " + std::to_string(m) + " exceeds T = " + std::to_string(T));
  const Index n = T - m + 1;
  StructureLayout layout{m, n, T, {}};
  layout.entries.reserve(static_cast<std::size_t>(m * n));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) layout.entries.push_back(CellEntry::parameter(i, j, i + j));
  return StructureSpec(layout);
}

namespace {

// Places the multiplication matrix S_k(a) (k rows, deg + k columns) with its
// top-left corner at (row0, col0); `first` is the index of a_0 in p.
void place_multiplication(StructureLayout& layout, Index row0, Index col0, Index k, Index deg, Index first)
{
  for (Index i = 0; i < k; ++i)
    for (Index c = 0; c <= deg; ++c) layout.entries.push_back(CellEntry::parameter(row0 + i, col0 + i + c, first + c));
}

} // namespace

StructureSpec generalized_sylvester(const std::vector<Index>& degrees, SylvesterVariant variant)
{
  if (degrees.size() < 2) throw DimensionError("generalized_sylvester: need at least two polynomials");
  for (Index d : degrees)
    if (d < 1) throw DimensionError("generalized_sylvester: polynomial degrees must be at least 1");

  std::vector<Index> first(degrees.size());
  Index np = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    first[i] = np;
    np += degrees[i] + 1;
  }

  StructureLayout layout;
  layout.num_params = np;
  if (variant == SylvesterVariant::stacked) {
    const Index N = *std::max_element(degrees.begin(), degrees.end());
    layout.cols = 2 * N;
    Index row = 0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      const Index k = 2 * N - degrees[i];
      place_multiplication(layout, row, 0, k, degrees[i], first[i]);
      row += k;
    }
    layout.rows = row;
  } else {
    const Index n1 = degrees[0];
    Index col = 0;
    std::vector<Index> block_col(degrees.size(), 0);
    for (std::size_t j = 1; j < degrees.size(); ++j) {
      block_col[j] = col;
      col += n1 + degrees[j];
    }
    layout.cols = col;
    for (std::size_t j = 1; j < degrees.size(); ++j) place_multiplication(layout, 0, block_col[j], n1, degrees[j], first[j]);
    Index row = n1;
    for (std::size_t j = 1; j < degrees.size(); ++j) {
      place_multiplication(layout, row, block_col[j], degrees[j], n1, first[0]);
      row += degrees[j];
    }
    layout.rows = row;
  }
  return StructureSpec(layout);
}

} // namespace pslra
