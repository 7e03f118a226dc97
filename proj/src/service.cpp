#include "pcii/service.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pcii/error.hpp"
#include "pcii/matrix_io.hpp"

namespace pcii {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string new_session_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  std::uniform_int_distribution<unsigned> nibble(0, 15);
  std::string id;
  for (int i = 0; i < 32; ++i) id.push_back("0123456789abcdef"[nibble(rd)]);
  return id;
}

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::size_t label_index(const Session& s, const std::string& label) {
  for (std::size_t i = 0; i < s.entities.size(); ++i) {
    if (s.entities[i] == label) return i;
  }
  throw Error(ErrorCode::UnknownLabel, "no entity labelled '" + label + "'");
}

json indices_json(const TriadIndex& t) { return json::array({t.i + 1, t.j + 1, t.k + 1}); }

json triad_json(const TriadEntry& e, const Session& s) {
  return {{"indices", indices_json(e.where)},
          {"labels", {s.entities[e.where.i], s.entities[e.where.j], s.entities[e.where.k]}},
          {"values", {wire_number(e.values.x), wire_number(e.values.y), wire_number(e.values.z)}},
          {"kernel", wire_number(e.kernel)}};
}

json edit_json(const CellEdit& e, const Session& s) {
  return {{"row", e.row + 1},
          {"col", e.col + 1},
          {"labels", {s.entities[e.row], s.entities[e.col]}},
          {"current", wire_number(e.current)},
          {"proposed", wire_number(e.proposed)}};
}

}  // namespace

// --- pure parts -------------------------------------------------------------------

InconsistencyReport compute_report(const Session& s) {
  InconsistencyReport r;
  r.filled = s.comparisons.size();
  r.pairs = s.pair_count();
  r.complete = s.complete();

  const std::size_t n = s.order();
  std::vector<std::pair<TriadIndex, Triad>> items;
  const TriadKernel kernel = localisation_kernel(s.indicator);
  for (const auto& t : triads(n)) {
    const auto x = s.comparisons.find({t.i, t.j});
    const auto y = s.comparisons.find({t.i, t.k});
    const auto z = s.comparisons.find({t.j, t.k});
    if (x == s.comparisons.end() || y == s.comparisons.end() || z == s.comparisons.end()) continue;
    const Triad tr{x->second, y->second, z->second};
    items.emplace_back(t, tr);
    r.per_triad.push_back({t, tr, kernel(tr)});
  }
  if (items.empty()) return r;

  r.value = evaluate_over_triads(s.indicator, items).value;
  const TriadEntry* worst = &r.per_triad.front();
  for (const auto& e : r.per_triad) {
    if (e.kernel > worst->kernel) worst = &e;
  }
  r.worst = *worst;

  const Triad& v = worst->values;
  const TriadIndex& w = worst->where;
  if (kii_triad(v) > kTriadEqualityTolerance) {
    Repair rep;
    rep.edit = {w.i, w.k, v.y, v.x * v.z};
    rep.alternatives = {{w.i, w.j, v.x, v.y / v.z}, {w.j, w.k, v.z, v.y / v.x}};
    r.repair = rep;
  }
  return r;
}

PcMatrix session_matrix(const Session& s) {
  if (!s.complete()) {
    throw Error(ErrorCode::IncompleteSession,
                std::to_string(s.pair_count() - s.comparisons.size()) + " of " +
                    std::to_string(s.pair_count()) + " comparisons still missing");
  }
  std::vector<double> upper;
  for (const auto& [key, ratio] : s.comparisons) upper.push_back(ratio);
  return PcMatrix::from_upper(s.order(), upper);
}

// --- wire format ------------------------------------------------------------------

std::string wire_number(double v) { return format_number(v, 17); }

double parse_wire_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_ratio_literal(v.get<std::string>());
  throw Error(ErrorCode::ParseError, "expected a number or a numeric string");
}

json session_to_json(const Session& s) {
  json comparisons = json::array();
  for (const auto& [key, ratio] : s.comparisons) {
    comparisons.push_back({{"i", key.first + 1}, {"j", key.second + 1}, {"ratio", wire_number(ratio)}});
  }
  return {{"id", s.id},
          {"entities", s.entities},
          {"indicator", s.indicator.name()},
          {"comparisons", comparisons},
          {"pairs", s.pair_count()},
          {"created_ms", s.created_ms},
          {"updated_ms", s.updated_ms}};
}

Session session_from_json(const json& doc) {
  try {
    Session s;
    s.id = doc.at("id").get<std::string>();
    s.entities = doc.at("entities").get<std::vector<std::string>>();
    s.indicator = IndicatorId::parse(doc.at("indicator").get<std::string>());
    s.created_ms = doc.at("created_ms").get<std::int64_t>();
    s.updated_ms = doc.at("updated_ms").get<std::int64_t>();
    for (const auto& c : doc.at("comparisons")) {
      const auto i = c.at("i").get<std::size_t>();
      const auto j = c.at("j").get<std::size_t>();
      if (i < 1 || i >= j || j > s.order()) {
        throw Error(ErrorCode::ParseError, "comparison indices out of order or range");
      }
      s.comparisons[{i - 1, j - 1}] = parse_wire_number(c.at("ratio"));
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed session JSON: ") + e.what());
  }
}

json report_json(const InconsistencyReport& r, const Session& s) {
  json j{{"complete", r.complete},
         {"filled", r.filled},
         {"pairs", r.pairs},
         {"indicator", s.indicator.name()}};
  if (r.value) j["value"] = wire_number(*r.value);
  if (r.worst) j["worst_triad"] = triad_json(*r.worst, s);
  if (r.repair) {
    json alts = json::array();
    for (const auto& a : r.repair->alternatives) alts.push_back(edit_json(a, s));
    json rep = edit_json(r.repair->edit, s);
    rep["alternatives"] = alts;
    j["suggested_repair"] = rep;
  }
  json per = json::array();
  for (const auto& e : r.per_triad) per.push_back(triad_json(e, s));
  j["per_triad"] = per;
  return j;
}

// --- service --------------------------------------------------------------------

ElicitationService::ElicitationService(std::optional<fs::path> state_dir)
    : state_dir_(std::move(state_dir)) {
  if (!state_dir_) return;
  std::error_code ec;
  fs::create_directories(*state_dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create state directory " + state_dir_->string());
  for (const auto& file : fs::directory_iterator(*state_dir_)) {
    if (file.path().extension() != ".json") continue;
    std::ifstream in(file.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
      doc = json::parse(buf.str());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, file.path().string() + ": " + e.what());
    }
    Session s = session_from_json(doc);
    auto entry = std::make_shared<Entry>();
    entry->current = std::make_shared<const Snapshot>(Snapshot{s, compute_report(s)});
    sessions_[s.id] = std::move(entry);
  }
}

Session ElicitationService::create_session(std::vector<std::string> entities,
                                           const IndicatorId& indicator) {
  if (entities.size() < 3) {
    throw Error(ErrorCode::TooFewEntities, "a session needs at least 3 entities");
  }
  std::set<std::string> seen;
  for (const auto& e : entities) {
    if (e.empty()) throw Error(ErrorCode::ParseError, "entity labels must be non-empty");
    if (!seen.insert(e).second) throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + e + "'");
  }
  if (!is_normalized(indicator)) {
    throw Error(ErrorCode::NonConformingIndicator,
                indicator.name() + " is not normalized to [0, 1] and cannot drive elicitation");
  }
  Session s;
  s.entities = std::move(entities);
  s.indicator = indicator;
  s.created_ms = s.updated_ms = now_ms();

  auto entry = std::make_shared<Entry>();
  {
    std::unique_lock lock(sessions_mutex_);
    do s.id = new_session_id();
    while (sessions_.count(s.id));
    entry->current = std::make_shared<const Snapshot>(Snapshot{s, compute_report(s)});
    sessions_[s.id] = entry;
  }
  persist(s);
  return s;
}

std::shared_ptr<ElicitationService::Entry> ElicitationService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

std::shared_ptr<const ElicitationService::Snapshot> ElicitationService::snapshot(
    const std::string& id) const {
  const auto entry = find(id);
  std::lock_guard lock(entry->swap);
  return entry->current;
}

InconsistencyReport ElicitationService::submit_comparison(const std::string& id,
                                                          const std::string& i,
                                                          const std::string& j, double ratio) {
  const auto entry = find(id);
  std::lock_guard write(entry->write);
  if (entry->deleted) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  Session s = entry->current->session;

  std::size_t a = label_index(s, i);
  std::size_t b = label_index(s, j);
  if (a == b) throw Error(ErrorCode::DuplicateLabel, "a comparison needs two different entities");
  if (!std::isfinite(ratio) || !(ratio > kMinEntry && ratio < kMaxEntry)) {
    throw Error(ErrorCode::NonPositiveRatio, "ratio must lie in (1e-15, 1e15)");
  }
  if (a > b) {
    std::swap(a, b);
    ratio = 1.0 / ratio;
  }
  s.comparisons[{a, b}] = ratio;
  s.updated_ms = now_ms();

  auto next = std::make_shared<const Snapshot>(Snapshot{s, compute_report(s)});
  persist(next->session);
  {
    std::lock_guard swap(entry->swap);
    entry->current = next;
  }
  return next->report;
}

InconsistencyReport ElicitationService::get_report(const std::string& id) const {
  return snapshot(id)->report;
}

Session ElicitationService::get_session(const std::string& id) const {
  return snapshot(id)->session;
}

std::string ElicitationService::export_matrix(const std::string& id, ExportFormat format) const {
  const auto snap = snapshot(id);
  const PcMatrix m = session_matrix(snap->session);
  return format == ExportFormat::Csv ? to_csv(m) : to_json(m).dump() + "\n";
}

void ElicitationService::delete_session(const std::string& id) {
  const auto entry = find(id);
  std::lock_guard write(entry->write);
  if (entry->deleted) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  entry->deleted = true;
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_.erase(id);
  }
  if (state_dir_ && valid_session_id(id)) {
    std::error_code ec;
    fs::remove(*state_dir_ / (id + ".json"), ec);
  }
}

std::vector<std::string> ElicitationService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

void ElicitationService::persist(const Session& s) const {
  if (!state_dir_) return;
  const fs::path target = *state_dir_ / (s.id + ".json");
  const fs::path tmp = *state_dir_ / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << session_to_json(s).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot replace " + target.string());
}

}  // namespace pcii
