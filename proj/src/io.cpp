#include "pslra/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace pslra::io {

namespace {

Index integer_field(const Json& obj, const std::string& key, const std::string& where)
{
  if (!obj.contains(key)) throw FormatError(where + ": missing field \"" + key + "\"");
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) throw FormatError(where + ": field \"" + key + "\" must be an integer");
  return v.get<Index>();
}

std::vector<std::string> tokenize(const std::string& text)
{
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    if (ch == ',' || ch == ';' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

double parse_number(const std::string& token, const std::string& what, std::size_t position)
{
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw FormatError(what + ": entry " + std::to_string(position) + " (\"" + token + "\") is not a number");
  return value;
}

bool is_missing_token(const std::string& token)
{
  if (token == "?") return true;
  std::string lower;
  for (char ch : token) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return lower == "nan";
}

std::vector<std::string> non_empty_lines(const std::string& text)
{
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!tokenize(line).empty()) lines.push_back(line);
  }
  return lines;
}

void dump(const Json& doc, std::string& out)
{
  switch (doc.type()) {
  case Json::value_t::object: {
    out.push_back('{');
    bool first = true;
    for (const auto& [key, value] : doc.items()) {
      if (!first) out.push_back(',');
      first = false;
      out += Json(key).dump();
      out.push_back(':');
      dump(value, out);
    }
    out.push_back('}');
    break;
  }
  case Json::value_t::array: {
    out.push_back('[');
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i > 0) out.push_back(',');
      dump(doc[i], out);
    }
    out.push_back(']');
    break;
  }
  case Json::value_t::number_float: {
    const double x = doc.get<double>();
    if (!std::isfinite(x)) {
      out += "null";
    } else {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
    }
    break;
  }
  default:
    out += doc.dump();
  }
}

} // namespace

StructureLayout parse_structure_layout(const Json& doc)
{
  if (!doc.is_object()) throw FormatError("structure: document must be a JSON object");
  StructureLayout layout;
  layout.rows = integer_field(doc, "m", "structure");
  layout.cols = integer_field(doc, "n", "structure");
  layout.num_params = integer_field(doc, "num_params", "structure");
  if (!doc.contains("entries")) throw FormatError("structure: missing field \"entries\"");
  const Json& entries = doc.at("entries");
  if (!entries.is_array()) throw FormatError("structure: field \"entries\" must be an array");

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "structure: entries[" + std::to_string(i) + "]";
    const Json& e = entries[i];
    if (!e.is_object()) throw FormatError(where + " must be an object");
    const Index row = integer_field(e, "row", where);
    const Index col = integer_field(e, "col", where);
    const bool has_param = e.contains("param");
    const bool has_fixed = e.contains("fixed");
    if (has_param == has_fixed) throw FormatError(where + ": exactly one of \"param\" and \"fixed\" is required");
    if (has_param) {
      layout.entries.push_back(CellEntry::parameter(row, col, integer_field(e, "param", where)));
    } else {
      const Json& v = e.at("fixed");
      if (!v.is_number()) throw FormatError(where + ": field \"fixed\" must be a number");
      layout.entries.push_back(CellEntry::fixed(row, col, v.get<double>()));
    }
  }
  return layout;
}

StructureLayout read_structure_layout(const std::filesystem::path& path)
{
  Json doc;
  try {
    doc = Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw FormatError("structure: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return parse_structure_layout(doc);
}

StructureSpec read_structure(const std::filesystem::path& path) { return StructureSpec(read_structure_layout(path)); }

Json structure_to_json(const StructureSpec& spec)
{
  const StructureLayout layout = spec.layout();
  Json entries = Json::array();
  for (const auto& e : layout.entries) {
    Json item = {{"row", e.row}, {"col", e.col}};
    if (e.param)
      item["param"] = *e.param;
    else
      item["fixed"] = e.fixed_value;
    entries.push_back(std::move(item));
  }
  return {{"m", layout.rows}, {"n", layout.cols}, {"num_params", layout.num_params}, {"entries", std::move(entries)}};
}

void write_structure(const std::filesystem::path& path, const StructureSpec& spec)
{
  write_text(path, canonical_dump(structure_to_json(spec)) + "\n");
}

MaybeVector parse_values(const std::string& text, const std::string& what)
{
  const auto tokens = tokenize(text);
  MaybeVector out;
  out.values.resize(static_cast<Index>(tokens.size()));
  out.missing.assign(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (is_missing_token(tokens[i])) {
      out.missing[i] = true;
      out.values(static_cast<Index>(i)) = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.values(static_cast<Index>(i)) = parse_number(tokens[i], what, i);
      if (!std::isfinite(out.values(static_cast<Index>(i))))
        throw FormatError(what + ": entry " + std::to_string(i) + " is not finite");
    }
  }
  return out;
}

MaybeVector read_params(const std::filesystem::path& path)
{
  MaybeVector out = parse_values(read_text(path), "params");
  if (out.values.size() == 0) throw FormatError("params: " + path.string() + " holds no values");
  return out;
}

WeightSpec read_weights(const std::filesystem::path& path, Index n)
{
  const std::string text = read_text(path);
  const MaybeVector all = parse_values(text, "weights");
  for (bool m : all.missing)
    if (m) throw FormatError("weights: missing entries are not allowed");

  if (all.values.size() == n) return WeightSpec::diagonal(all.values);
  if (all.values.size() == n * n) {
    const auto lines = non_empty_lines(text);
    if (static_cast<Index>(lines.size()) != n)
      throw FormatError("weights: a full weight matrix needs " + std::to_string(n) + " rows, found " +
                        std::to_string(lines.size()));
    Matrix W(n, n);
    for (Index i = 0; i < n; ++i) {
      const MaybeVector row = parse_values(lines[static_cast<std::size_t>(i)], "weights");
      if (row.values.size() != n)
        throw FormatError("weights: row " + std::to_string(i) + " has " + std::to_string(row.values.size()) +
                          " entries, expected " + std::to_string(n));
      W.row(i) = row.values.transpose();
    }
    return WeightSpec::full(W);
  }
  throw FormatError("weights: expected " + std::to_string(n) + " or " + std::to_string(n * n) + " values, found " +
                    std::to_string(all.values.size()));
}

std::vector<bool> read_mask(const std::filesystem::path& path)
{
  const auto tokens = tokenize(read_text(path));
  std::vector<bool> mask;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "1")
      mask.push_back(true);
    else if (tokens[i] == "0")
      mask.push_back(false);
    else
      throw FormatError("missing-mask: entry " + std::to_string(i) + " (\"" + tokens[i] + "\") must be 0 or 1");
  }
  return mask;
}

std::vector<Vector> read_polys(const std::filesystem::path& path)
{
  std::vector<Vector> polys;
  const auto lines = non_empty_lines(read_text(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string what = "polys: line " + std::to_string(i + 1);
    const MaybeVector row = parse_values(lines[i], what);
    for (bool m : row.missing)
      if (m) throw FormatError(what + ": missing coefficients are not allowed");
    polys.push_back(row.values);
  }
  if (polys.empty()) throw FormatError("polys: " + path.string() + " holds no polynomials");
  return polys;
}

Json to_json(const Vector& v)
{
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Matrix& M)
{
  Json out = Json::array();
  for (Index i = 0; i < M.rows(); ++i) out.push_back(to_json(Vector(M.row(i).transpose())));
  return out;
}

std::string canonical_dump(const Json& doc)
{
  std::string out;
  dump(doc, out);
  return out;
}

std::string read_text(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string trajectory_csv(const std::vector<std::string>& names, const std::vector<Vector>& columns)
{
  if (names.size() != columns.size()) throw DimensionError("trajectory_csv: one name per column required");
  const Index T = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != T) throw DimensionError("trajectory_csv: columns differ in length");

  std::string out = "t";
  for (const auto& name : names) out += "," + name;
  out += "\n";
  char buf[40];
  for (Index t = 0; t < T; ++t) {
    out += std::to_string(t + 1);
    for (const auto& c : columns) {
      if (std::isnan(c(t))) {
        out += ",?";
      } else {
        std::snprintf(buf, sizeof buf, ",%.17g", c(t));
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

} // namespace pslra::io
