#pragma once

// Session store behind the elicitation HTTP API. An assessor fills the upper
// triangle one judgment at a time; each submission returns a report computed
// over the triads whose three entries are all known.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pcii/indicators.hpp"
#include "pcii/pc_matrix.hpp"

namespace pcii {

struct Session {
  std::string id;
  std::vector<std::string> entities;
  /// Keyed by 0-based (i, j) with i < j.
  std::map<std::pair<std::size_t, std::size_t>, double> comparisons;
  IndicatorId indicator = IndicatorId::of(IndicatorKind::Kii);
  /// Unix milliseconds.
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;

  std::size_t order() const noexcept { return entities.size(); }
  std::size_t pair_count() const noexcept { return order() * (order() - 1) / 2; }
  bool complete() const noexcept { return comparisons.size() == pair_count(); }

  bool operator==(const Session&) const = default;
};

struct TriadEntry {
  TriadIndex where;
  Triad values;
  double kernel = 0.0;

  bool operator==(const TriadEntry&) const = default;
};

/// One cell change, 0-based with row < col.
struct CellEdit {
  std::size_t row = 0;
  std::size_t col = 0;
  double current = 1.0;
  double proposed = 1.0;

  bool operator==(const CellEdit&) const = default;
};

struct Repair {
  /// Replace the middle value y = a_ik by x * z.
  CellEdit edit;
  /// x := y / z and z := y / x; listed, not ranked.
  std::vector<CellEdit> alternatives;

  bool operator==(const Repair&) const = default;
};

struct InconsistencyReport {
  bool complete = false;
  std::size_t filled = 0;
  std::size_t pairs = 0;
  /// Present once at least one triad is fully filled.
  std::optional<double> value;
  /// Triad with the largest localisation kernel (first in lexicographic order
  /// on ties) and that kernel's value.
  std::optional<TriadEntry> worst;
  /// Present when the worst triad is not consistent.
  std::optional<Repair> repair;
  std::vector<TriadEntry> per_triad;

  bool operator==(const InconsistencyReport&) const = default;
};

/// Pure function of the session state.
InconsistencyReport compute_report(const Session& s);

/// Reciprocal matrix of a complete session. Throws IncompleteSession.
PcMatrix session_matrix(const Session& s);

enum class ExportFormat { Csv, Json };

class ElicitationService {
 public:
  /// Without a state directory sessions live in memory only. With one, every
  /// session is mirrored to <dir>/<id>.json and existing files are loaded.
  explicit ElicitationService(std::optional<std::filesystem::path> state_dir = std::nullopt);

  /// Throws TooFewEntities, DuplicateLabel, NonConformingIndicator.
  Session create_session(std::vector<std::string> entities, const IndicatorId& indicator);

  /// Stores the ratio at the canonical (i < j) slot, inverting it when the
  /// labels come in reverse order; overwrites an earlier judgment. Throws
  /// UnknownSession, UnknownLabel, DuplicateLabel (i == j), NonPositiveRatio.
  InconsistencyReport submit_comparison(const std::string& id, const std::string& i,
                                        const std::string& j, double ratio);

  InconsistencyReport get_report(const std::string& id) const;
  Session get_session(const std::string& id) const;
  /// Throws UnknownSession, IncompleteSession.
  std::string export_matrix(const std::string& id, ExportFormat format) const;
  /// Throws UnknownSession.
  void delete_session(const std::string& id);

  std::vector<std::string> session_ids() const;

 private:
  struct Snapshot {
    Session session;
    InconsistencyReport report;
  };
  struct Entry {
    std::mutex write;                 // serializes submissions to one session
    mutable std::mutex swap;          // guards only the pointer exchange
    std::shared_ptr<const Snapshot> current;
    bool deleted = false;             // guarded by write
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::shared_ptr<const Snapshot> snapshot(const std::string& id) const;
  void persist(const Session& s) const;

  std::optional<std::filesystem::path> state_dir_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

// --- wire format -----------------------------------------------------------------
// Numbers travel as decimal strings with 17 significant digits; indices are
// 1-based.

std::string wire_number(double v);
/// Accepts a JSON number or a string literal ("0.25", "1/4"). Throws ParseError.
double parse_wire_number(const nlohmann::json& v);

nlohmann::json session_to_json(const Session& s);
Session session_from_json(const nlohmann::json& doc);
nlohmann::json report_json(const InconsistencyReport& r, const Session& s);

}  // namespace pcii
