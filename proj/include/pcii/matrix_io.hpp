#pragma once

// Matrix file formats shared by the CLI and the elicitation service:
//   CSV  - n rows of n comma-separated literals, no header
//   JSON - {"n": <int>, "rows": [[...], ...]}
// A literal is a decimal number or an exact rational "p/q" of non-negative
// integers; rationals are parsed exactly, then rounded once to double.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pcii/pc_matrix.hpp"

namespace pcii {

using RawMatrix = std::vector<std::vector<double>>;

/// Parses "0.25", "1e3", "4" or "1/4". Throws ParseError.
double parse_ratio_literal(std::string_view text);

RawMatrix parse_csv_matrix(std::string_view text);
RawMatrix parse_json_matrix(const nlohmann::json& doc);

/// Dispatches on extension (.csv / .json) and validates the result.
PcMatrix load_matrix(const std::filesystem::path& path,
                     ValidationMode mode = ValidationMode::Strict);

/// Every entry printed with 17 significant digits, so reading the file back
/// reproduces the matrix bit-for-bit.
std::string to_csv(const PcMatrix& a);
nlohmann::json to_json(const PcMatrix& a);

void save_matrix(const PcMatrix& a, const std::filesystem::path& path);

/// printf-style %.{digits}g.
std::string format_number(double v, int significant_digits);

}  // namespace pcii
