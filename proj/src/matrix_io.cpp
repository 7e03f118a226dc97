#include "pcii/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcii/error.hpp"

namespace pcii {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_literal(std::string_view text) {
  throw Error(ErrorCode::ParseError, "cannot parse number '" + std::string(text) + "'");
}

// Integers up to 2^53 convert to double exactly, so p/q rounds only once.
double parse_exact_integer(std::string_view text) {
  constexpr unsigned long long kExactLimit = 1ULL << 53;
  unsigned long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_literal(text);
  if (v > kExactLimit) {
    throw Error(ErrorCode::ParseError,
                "rational component '" + std::string(text) + "' exceeds 2^53");
  }
  return static_cast<double>(v);
}

}  // namespace

double parse_ratio_literal(std::string_view text) {
  text = trim(text);
  if (text.empty()) bad_literal(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double p = parse_exact_integer(trim(text.substr(0, slash)));
    const double q = parse_exact_integer(trim(text.substr(slash + 1)));
    if (q == 0.0) {
      throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
    }
    return p / q;
  }
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_literal(text);
  return v;
}

RawMatrix parse_csv_matrix(std::string_view text) {
  RawMatrix rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = line.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start);
      try {
        row.push_back(parse_ratio_literal(cell));
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": " + e.what(), rows.size() + 1,
                    row.size() + 1);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RawMatrix parse_json_matrix(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(ErrorCode::ParseError, "matrix JSON needs a \"rows\" array");
  }
  RawMatrix rows;
  for (const auto& jrow : doc["rows"]) {
    if (!jrow.is_array()) throw Error(ErrorCode::ParseError, "each row must be an array");
    std::vector<double> row;
    for (const auto& cell : jrow) {
      if (cell.is_number()) {
        row.push_back(cell.get<double>());
      } else if (cell.is_string()) {
        row.push_back(parse_ratio_literal(cell.get<std::string>()));
      } else {
        throw Error(ErrorCode::ParseError, "matrix entries must be numbers or strings",
                    rows.size() + 1, row.size() + 1);
      }
    }
    rows.push_back(std::move(row));
  }
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 0 ||
        static_cast<std::size_t>(doc["n"].get<long long>()) != rows.size()) {
      throw Error(ErrorCode::NonSquare, "\"n\" does not match the number of rows");
    }
  }
  return rows;
}

PcMatrix load_matrix(const std::filesystem::path& path, ValidationMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return PcMatrix::validate(parse_json_matrix(doc), mode);
  }
  return PcMatrix::validate(parse_csv_matrix(text), mode);
}

std::string format_number(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

std::string to_csv(const PcMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.order(); ++i) {
    for (std::size_t j = 0; j < a.order(); ++j) {
      if (j) out += ',';
      out += format_number(a(i, j), 17);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const PcMatrix& a) {
  return {{"n", a.order()}, {"rows", a.rows()}};
}

void save_matrix(const PcMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  if (path.extension() == ".json") {
    out << to_json(a).dump() << '\n';
  } else {
    out << to_csv(a);
  }
}

}  // namespace pcii
