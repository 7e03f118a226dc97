#include "pcii/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "pcii/error.hpp"
#include "pcii/generators.hpp"
#include "pcii/harness.hpp"
#include "pcii/http_server.hpp"
#include "pcii/indicators.hpp"
#include "pcii/matrix_io.hpp"

namespace pcii {

namespace {

using nlohmann::json;

constexpr int kTextDigits = 6;
constexpr int kJsonDigits = 12;

std::string text(double v) { return format_number(v, kTextDigits); }
double json_number(double v) { return std::strtod(format_number(v, kJsonDigits).c_str(), nullptr); }

// Thrown for problems with the input matrix (exit 1) as opposed to the
// command line (exit 2).
struct MatrixFailure {
  Error error;
};

PcMatrix load_or_fail(const std::string& path, ValidationMode mode = ValidationMode::Strict) {
  try {
    return load_matrix(path, mode);
  } catch (const Error& e) {
    throw MatrixFailure{e};
  }
}

void print_error(std::ostream& err, const Error& e) {
  err << "error: " << to_string(e.code());
  if (e.row() && e.col()) {
    err << " at (" << *e.row() << ", " << *e.col() << ")";
  } else if (e.row()) {
    err << " at row " << *e.row();
  }
  err << ": " << e.what() << '\n';
}

std::string triad_values(const Triad& t) {
  return "(" + text(t.x) + ", " + text(t.y) + ", " + text(t.z) + ")";
}

json triad_index_json(const TriadIndex& t) { return json::array({t.i + 1, t.j + 1, t.k + 1}); }

std::string cell(std::size_t r, std::size_t c) {
  return "a" + std::to_string(r + 1) + std::to_string(c + 1);
}

// --- report printing ----------------------------------------------------------

void print_report(std::ostream& out, const AxiomReport& r) {
  out << to_string(r.axiom) << ' ' << axiom_title(r.axiom) << ' ' << r.indicator.name() << ": "
      << to_string(r.verdict) << " (samples " << r.samples << ", trials " << r.trials << ")\n";
  if (r.counterexample) {
    const auto& ce = *r.counterexample;
    out << "  counterexample: " << ce.description << '\n';
    if (!ce.selector.empty()) {
      out << "  selector:";
      for (auto i : ce.selector) out << ' ' << i + 1;
      out << '\n';
    }
    if (!ce.permutation.empty()) {
      out << "  permutation:";
      for (auto i : ce.permutation) out << ' ' << i + 1;
      out << '\n';
    }
    for (const auto& w : ce.witnesses) {
      out << "  " << w.label << " (ii = " << text(w.value) << "):\n";
      for (std::size_t i = 0; i < w.matrix.order(); ++i) {
        out << "   ";
        for (std::size_t j = 0; j < w.matrix.order(); ++j) out << ' ' << std::setw(12) << text(w.matrix(i, j));
        out << '\n';
      }
    }
  }
  for (const auto& d : r.phi_table) {
    out << "  distance " << to_string(d.distance) << ": " << to_string(d.verdict);
    if (!d.note.empty()) out << " (" << d.note << ")";
    out << '\n';
    for (const auto& row : d.rows) {
      out << "    phi " << std::setw(6) << text(row.phi) << "  floor " << std::setw(10) << text(row.floor)
          << "  rel.err " << std::setw(10) << text(row.relative_error) << "  trials " << row.trials << '\n';
    }
  }
}

json reports_json(const std::vector<AxiomReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r, kJsonDigits));
  return arr;
}

// --- verbs --------------------------------------------------------------------

struct Options {
  std::string indicator = "kii";
  std::string matrix;
  std::string out_path;
  std::string axiom;
  std::string distance;
  std::string state;
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  std::size_t n = 3;
  double spread = 0.0;
  int port = 8080;
  bool json = false;
  bool consistent = false;
};

int cmd_compute(const Options& o, std::ostream& out) {
  const auto id = IndicatorId::parse(o.indicator);
  const auto a = load_or_fail(o.matrix);
  const auto r = evaluate(id, a);
  if (o.json) {
    json j{{"indicator", id.name()}, {"n", a.order()}, {"value", json_number(r.value)}};
    if (r.worst_triad) j["worst_triad"] = triad_index_json(*r.worst_triad);
    if (r.principal_eigenvalue) j["lambda_max"] = json_number(*r.principal_eigenvalue);
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "indicator: " << id.name() << '\n' << "value: " << text(r.value) << '\n';
  if (r.worst_triad) out << "worst triad: " << to_string(*r.worst_triad) << '\n';
  if (r.principal_eigenvalue) out << "lambda_max: " << text(*r.principal_eigenvalue) << '\n';
  return kExitOk;
}

AxiomCheckConfig config_from(const Options& o) {
  AxiomCheckConfig cfg;
  cfg.rng_seed = o.seed;
  cfg.samples = o.samples;
  if (!o.distance.empty()) cfg.distances = {parse_distance(o.distance)};
  return cfg;
}

int cmd_check_axioms(const Options& o, std::ostream& out) {
  const auto id = IndicatorId::parse(o.indicator);
  const auto cfg = config_from(o);
  std::vector<AxiomReport> reports;
  if (!o.axiom.empty()) {
    reports.push_back(check_axiom(parse_axiom(o.axiom), id, cfg));
  } else {
    for (AxiomId a : kAllAxioms) reports.push_back(check_axiom(a, id, cfg));
  }
  if (o.json) {
    const json j = reports.size() == 1 ? report_to_json(reports[0], kJsonDigits) : reports_json(reports);
    out << j.dump(2) << '\n';
  } else {
    for (const auto& r : reports) print_report(out, r);
  }
  return kExitOk;
}

int cmd_independence(const Options& o, std::ostream& out) {
  const auto grid = independence_grid(config_from(o));
  const auto deviations = independence_deviations(grid);
  if (o.json) {
    json rows = json::array();
    for (const auto& row : grid) rows.push_back(reports_json(row));
    out << json{{"grid", rows}, {"deviations", deviations}}.dump(2) << '\n';
  } else {
    out << std::left << std::setw(6) << "";
    for (AxiomId a : kAllAxioms) out << std::setw(14) << to_string(a);
    out << '\n';
    for (const auto& row : grid) {
      out << std::setw(6) << row.front().indicator.name();
      for (const auto& r : row) out << std::setw(14) << to_string(r.verdict);
      out << '\n';
    }
    out << std::right;
    for (const auto& row : grid) {
      for (const auto& r : row) {
        if (r.counterexample) out << r.indicator.name() << '/' << to_string(r.axiom) << ": "
                                  << r.counterexample->description << '\n';
      }
    }
    for (const auto& d : deviations) out << "DEVIATION " << d << '\n';
    out << (deviations.empty() ? "each ii_j fails exactly A_j\n" : "grid deviates from the theorem\n");
  }
  return deviations.empty() ? kExitOk : kExitFailure;
}

int cmd_consistency_suite(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<AxiomReport> reports;
  int status = kExitOk;
  try {
    reports = run_consistency_suite(config_from(o));
  } catch (const SuiteViolation& e) {
    reports = e.reports();
    err << "error: " << e.what() << '\n';
    status = kExitFailure;
  }
  if (o.json) {
    out << reports_json(reports).dump(2) << '\n';
  } else {
    for (const auto& r : reports) print_report(out, r);
  }
  return status;
}

int cmd_reciprocalize(const Options& o, std::ostream& out) {
  const auto a = load_or_fail(o.matrix, ValidationMode::Lenient);
  save_matrix(reciprocalize(a), o.out_path);
  out << "wrote " << o.out_path << '\n';
  return kExitOk;
}

int cmd_worst_triad(const Options& o, std::ostream& out) {
  const auto id = IndicatorId::parse(o.indicator);
  // CI has no triad kernel; Kii's localises the same inconsistency.
  const TriadKernel kernel =
      id.kind() == IndicatorKind::CI ? TriadKernel(kii_triad) : localisation_kernel(id);
  const auto a = load_or_fail(o.matrix);
  if (a.order() < 3) throw MatrixFailure{Error(ErrorCode::OrderTooSmall, "need order n >= 3")};
  if (!a.is_reciprocal()) throw MatrixFailure{Error(ErrorCode::NotReciprocal, "matrix is not reciprocal")};

  TriadIndex worst{};
  double worst_kernel = -1.0;
  for (const auto& t : triads(a.order())) {
    const double k = kernel(triad_at(a, t));
    if (k > worst_kernel) {
      worst_kernel = k;
      worst = t;
    }
  }
  const Triad v = triad_at(a, worst);
  const bool repair = kii_triad(v) > kTriadEqualityTolerance;
  if (o.json) {
    json j{{"indicator", id.name()},
           {"triad", triad_index_json(worst)},
           {"values", {json_number(v.x), json_number(v.y), json_number(v.z)}},
           {"kernel", json_number(worst_kernel)}};
    if (repair) {
      j["repair"] = {{"cell", {worst.i + 1, worst.k + 1}},
                     {"current", json_number(v.y)},
                     {"proposed", json_number(v.x * v.z)}};
      j["alternatives"] = json::array(
          {{{"cell", {worst.i + 1, worst.j + 1}}, {"current", json_number(v.x)}, {"proposed", json_number(v.y / v.z)}},
           {{"cell", {worst.j + 1, worst.k + 1}}, {"current", json_number(v.z)}, {"proposed", json_number(v.y / v.x)}}});
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "triad: " << to_string(worst) << '\n'
      << "values: " << triad_values(v) << '\n'
      << "kernel: " << text(worst_kernel) << '\n';
  if (repair) {
    out << "repair: " << cell(worst.i, worst.k) << " = " << text(v.y) << " -> " << text(v.x * v.z) << '\n'
        << "alternatives: " << cell(worst.i, worst.j) << " = " << text(v.x) << " -> " << text(v.y / v.z)
        << "; " << cell(worst.j, worst.k) << " = " << text(v.z) << " -> " << text(v.y / v.x) << '\n';
  } else {
    out << "repair: none (triad is consistent)\n";
  }
  return kExitOk;
}

int cmd_gen(const Options& o, std::ostream& out) {
  const auto a = o.consistent ? random_consistent_matrix(o.n, o.spread, o.seed)
                              : random_pc_matrix(o.n, o.spread, o.seed);
  save_matrix(a, o.out_path);
  out << "wrote " << o.out_path << '\n';
  return kExitOk;
}

std::atomic<bool> g_stop_requested{false};

extern "C" void request_stop(int) { g_stop_requested = true; }

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<std::filesystem::path> state;
  if (!o.state.empty()) state = o.state;
  ElicitationService service(state);
  HttpServer server(service);
  const std::string host = "127.0.0.1";
  const int port = server.bind(host, o.port);
  if (port < 0) {
    err << "error: cannot bind " << host << ':' << o.port << '\n';
    return kExitFailure;
  }

  g_stop_requested = false;
  auto* prev_int = std::signal(SIGINT, request_stop);
  auto* prev_term = std::signal(SIGTERM, request_stop);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (g_stop_requested) {
        server.stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });

  out << "listening on http://" << host << ':' << port << std::endl;
  const bool ok = server.listen_after_bind();
  done = true;
  watcher.join();
  std::signal(SIGINT, prev_int);
  std::signal(SIGTERM, prev_term);
  out << "stopped" << std::endl;
  return ok || g_stop_requested ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inconsistency indicators for pairwise-comparison matrices", "pcii"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&o](CLI::App* c) {
    c->add_option("--seed", o.seed, "RNG seed")->envname("PCII_SEED");
  };

  auto* compute = app.add_subcommand("compute", "Evaluate an indicator on a matrix");
  compute->add_option("--indicator", o.indicator, "Indicator id")->required();
  compute->add_option("--matrix", o.matrix, "Matrix file (.csv or .json)")->required();
  compute->add_flag("--json", o.json, "JSON output");

  auto* check = app.add_subcommand("check-axioms", "Check an indicator against the axioms");
  check->add_option("--indicator", o.indicator, "Indicator id")->required();
  check->add_option("--axiom", o.axiom, "A1..A5 (default: all)");
  add_seed(check);
  check->add_option("--samples", o.samples, "Samples per check")->check(CLI::PositiveNumber);
  check->add_option("--distance", o.distance, "A3 distance")->check(CLI::IsMember({"log", "abs"}));
  check->add_flag("--json", o.json, "JSON output");

  auto* indep = app.add_subcommand("independence", "Run the 5 x 5 independence grid");
  add_seed(indep);
  indep->add_option("--samples", o.samples, "Samples per check")->check(CLI::PositiveNumber);
  indep->add_flag("--json", o.json, "JSON output");

  auto* suite = app.add_subcommand("consistency-suite", "Check Kii against all five axioms");
  add_seed(suite);
  suite->add_option("--samples", o.samples, "Samples per check")->check(CLI::PositiveNumber);
  suite->add_flag("--json", o.json, "JSON output");

  auto* recip = app.add_subcommand("reciprocalize", "Geometric-mean reciprocalization");
  recip->add_option("--matrix", o.matrix, "Input matrix")->required();
  recip->add_option("--out", o.out_path, "Output path")->required();

  auto* worst = app.add_subcommand("worst-triad", "Locate the most inconsistent triad");
  worst->add_option("--indicator", o.indicator, "Indicator id")->required();
  worst->add_option("--matrix", o.matrix, "Matrix file")->required();
  worst->add_flag("--json", o.json, "JSON output");

  auto* gen = app.add_subcommand("gen", "Generate a random PC matrix");
  gen->add_option("--n", o.n, "Order")->required()->check(CLI::Range(3, 1000));
  gen->add_option("--spread", o.spread, "Log-range of entries")->required()->check(CLI::NonNegativeNumber);
  gen->add_flag("--consistent", o.consistent, "Draw a consistent matrix");
  add_seed(gen);
  gen->add_option("--out", o.out_path, "Output path")->required();

  auto* serve = app.add_subcommand("serve", "Start the elicitation service");
  serve->add_option("--port", o.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--state", o.state, "State directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (compute->parsed()) return cmd_compute(o, out);
    if (check->parsed()) return cmd_check_axioms(o, out);
    if (indep->parsed()) return cmd_independence(o, out);
    if (suite->parsed()) return cmd_consistency_suite(o, out, err);
    if (recip->parsed()) return cmd_reciprocalize(o, out);
    if (worst->parsed()) return cmd_worst_triad(o, out);
    if (gen->parsed()) return cmd_gen(o, out);
    if (serve->parsed()) return cmd_serve(o, out, err);
  } catch (const MatrixFailure& f) {
    print_error(err, f.error);
    return kExitFailure;
  } catch (const SuiteViolation& e) {
    print_error(err, e);
    return kExitFailure;
  } catch (const Error& e) {
    print_error(err, e);
    return e.code() == ErrorCode::IoError ? kExitFailure : kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pcii
