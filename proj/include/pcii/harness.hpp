#pragma once

// Randomized and exhaustive checkers for the five inconsistency-indicator
// axioms:
//   A1 consistency detection  ii(A) = 0 iff A is consistent
//   A2 normalization          ii(A) in [0, 1]
//   A3 error intolerance      a triad far from consistent keeps ii away from 0
//   A4 monotonicity           ii(submatrix) <= ii(A)
//   A5 order invariance       ii(permuted A) = ii(A)
//
// A check is a falsification attempt: FAIL always carries a witness that
// reverify() can re-check from scratch; PASS means nothing was found. A3 is
// the only axiom that can come back INCONCLUSIVE.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pcii/error.hpp"
#include "pcii/indicators.hpp"
#include "pcii/pc_matrix.hpp"

namespace pcii {

enum class AxiomId { A1, A2, A3, A4, A5 };

inline constexpr std::array<AxiomId, 5> kAllAxioms{AxiomId::A1, AxiomId::A2, AxiomId::A3,
                                                   AxiomId::A4, AxiomId::A5};

/// "A1".."A5" (case-insensitive, "a1" and "1" also accepted). Throws UnknownAxiom.
AxiomId parse_axiom(std::string_view text);
std::string_view to_string(AxiomId axiom);
/// Long tag, e.g. "CONSISTENCY_DETECTION".
std::string_view axiom_title(AxiomId axiom);

/// Distance on the positive reals used by A3 to decide that y is "far" from xz.
enum class DistanceKind { LogAbs, AbsDiff };

std::string_view to_string(DistanceKind d);
/// "log" or "abs". Throws ParseError.
DistanceKind parse_distance(std::string_view text);
double distance(DistanceKind d, double a, double b);

enum class Verdict { Pass, Fail, Inconclusive };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct AxiomCheckConfig {
  std::uint64_t rng_seed = 1;
  std::size_t samples = 200;
  std::size_t max_order = 7;
  std::size_t exhaustive_order = 6;
  double tolerance = 1e-10;
  /// A3 passes if it passes under any of these.
  std::vector<DistanceKind> distances{DistanceKind::LogAbs, DistanceKind::AbsDiff};
  std::vector<double> phi_grid{0.5, 1.0, 2.0, 5.0};
  /// c of the (2^n, 4^n + c, 2^n) escalation.
  double embed_constant = 10.0;
  /// Log-range of random entries.
  double spread = std::log(9.0);
  /// Selectors drawn per (matrix, m) above exhaustive_order.
  std::size_t sampled_selectors = 200;
  /// Try the known counterexample matrices before random search.
  bool use_regression_corpus = true;
  /// How the A3 phi table phrases each floor witness as a relative error.
  TriadErrorConvention error_convention = TriadErrorConvention::ProductAsTruth;

  /// Throws ParseError when samples == 0, max_order < 4, a phi value is not
  /// positive or no distance is configured.
  void validate() const;
};

struct Witness {
  std::string label;
  PcMatrix matrix;
  double value = 0.0;

  bool operator==(const Witness&) const = default;
};

struct Counterexample {
  std::string description;
  /// A1/A2/A3: one matrix. A4: {A, B} with B = A[selector].
  /// A5: {A, P} with P = permute(A, permutation).
  std::vector<Witness> witnesses;
  std::vector<std::size_t> selector;     // 0-based, A4 only
  std::vector<std::size_t> permutation;  // images, A5 only
  std::optional<double> phi;             // A3 only
  std::optional<DistanceKind> distance;  // A3 only
  double tolerance = 0.0;

  bool operator==(const Counterexample&) const = default;
};

struct PhiRow {
  double phi = 0.0;
  /// Smallest ii seen among samples whose triad distance exceeds phi.
  double floor = 0.0;
  /// Relative error of the triad attaining the floor.
  double relative_error = 0.0;
  std::size_t trials = 0;

  bool operator==(const PhiRow&) const = default;
};

struct DistanceReport {
  DistanceKind distance = DistanceKind::LogAbs;
  Verdict verdict = Verdict::Pass;
  std::vector<PhiRow> rows;
  /// Which escalation family decided the verdict, if any.
  std::string note;

  bool operator==(const DistanceReport&) const = default;
};

struct AxiomReport {
  AxiomId axiom = AxiomId::A1;
  IndicatorId indicator = IndicatorId::of(IndicatorKind::Kii);
  Verdict verdict = Verdict::Pass;
  /// Matrices drawn.
  std::size_t samples = 0;
  /// Individual comparisons made (submatrices, permutations, evaluations).
  std::size_t trials = 0;
  std::optional<Counterexample> counterexample;
  /// A3 only.
  std::vector<DistanceReport> phi_table;
  TriadErrorConvention error_convention = TriadErrorConvention::ProductAsTruth;

  bool operator==(const AxiomReport&) const = default;
};

AxiomReport check_axiom(AxiomId axiom, const IndicatorId& id, const AxiomCheckConfig& cfg = {});

/// Recomputes every witness value and the violated inequality. True when the
/// report is not a FAIL, or when its counterexample still violates the axiom
/// with exactly the stored values.
bool reverify(const AxiomReport& report);

/// ii1..ii5 in grid order.
std::vector<IndicatorId> independence_indicators();

/// grid[j][k] is the report for indicator ii_{j+1} on axiom A_{k+1}.
using ReportGrid = std::vector<std::vector<AxiomReport>>;

class SuiteViolation : public Error {
 public:
  SuiteViolation(const std::string& message, std::vector<AxiomReport> reports)
      : Error(ErrorCode::SuiteViolation, message), reports_(std::move(reports)) {}
  const std::vector<AxiomReport>& reports() const noexcept { return reports_; }

 private:
  std::vector<AxiomReport> reports_;
};

/// Runs the 5 x 5 grid (cells in parallel). Returns the grid whatever the
/// outcome; use independence_deviations to compare it with the theorem.
ReportGrid independence_grid(const AxiomCheckConfig& cfg = {});

/// Cells that differ from "ii_j fails exactly A_j" or whose FAIL does not
/// reverify, e.g. "ii3/A3: expected FAIL, got PASS".
std::vector<std::string> independence_deviations(const ReportGrid& grid);

/// independence_grid, throwing SuiteViolation (with the flattened grid) on
/// the first deviation.
ReportGrid run_independence_suite(const AxiomCheckConfig& cfg = {});

/// Kii against A1..A5. Throws SuiteViolation unless all five pass.
std::vector<AxiomReport> run_consistency_suite(const AxiomCheckConfig& cfg = {});

// --- serialization -----------------------------------------------------------

/// Lossless unless `significant_digits` is given, in which case every
/// floating value (including matrix entries) is rounded to that many digits.
nlohmann::json report_to_json(const AxiomReport& report,
                              std::optional<int> significant_digits = std::nullopt);
/// Throws ParseError on malformed input, UnknownIndicator for ids that are
/// not built in.
AxiomReport report_from_json(const nlohmann::json& doc);

std::string_view to_string(TriadErrorConvention c);

}  // namespace pcii
