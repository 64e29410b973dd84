#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pslra/weighting.hpp"

namespace pslra::io {

using Json = nlohmann::json;

///
/// Structure documents:
///   {"m": 3, "n": 4, "num_params": 6,
///    "entries": [{"row": 0, "col": 0, "param": 0}, {"row": 2, "col": 3, "fixed": 1.5}, ...]}
/// Unlisted cells are fixed at zero. Parsing errors throw FormatError naming
/// the offending field; semantic checks are left to validate().
///
StructureLayout parse_structure_layout(const Json& doc);
StructureLayout read_structure_layout(const std::filesystem::path& path);
/// Parses and validates; throws StructureError on violations.
StructureSpec read_structure(const std::filesystem::path& path);
Json structure_to_json(const StructureSpec& spec);
void write_structure(const std::filesystem::path& path, const StructureSpec& spec);

/// Numeric vector with missing marks ("?" or "nan" tokens).
struct MaybeVector {
  Vector values; // missing entries hold NaN
  std::vector<bool> missing;
};

/// Tokens separated by commas, whitespace or newlines. `what` names the
/// field in error messages.
MaybeVector parse_values(const std::string& text, const std::string& what);
MaybeVector read_params(const std::filesystem::path& path);

/// n values give diagonal weights; an n x n table (one row per line) gives full weights.
WeightSpec read_weights(const std::filesystem::path& path, Index n);

/// 0/1 tokens, 1 meaning missing.
std::vector<bool> read_mask(const std::filesystem::path& path);

/// One polynomial per non-empty line, ascending coefficients.
std::vector<Vector> read_polys(const std::filesystem::path& path);

Json to_json(const Vector& v);
Json to_json(const Matrix& M); // array of rows

/// Sorted keys, no whitespace, doubles with 17 significant digits, non-finite as null.
std::string canonical_dump(const Json& doc);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV of named equal-length columns after a leading 1-based "t" column.
/// NaN values are written as "?".
std::string trajectory_csv(const std::vector<std::string>& names, const std::vector<Vector>& columns);

} // namespace pslra::io
