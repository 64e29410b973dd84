#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pslra {

/// Sizes or ranks that do not fit together (m > T, r >= min(m,n), length mismatches).
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A structure description that violates the one-assignment-per-cell model.
class StructureError : public std::invalid_argument {
public:
  explicit StructureError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// Weights that are not symmetric PSD, or a mask applied to full weights.
class WeightError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input document. The message names the offending field.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace pslra
