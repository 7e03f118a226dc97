#include "pcii/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <set>

#include "pcii/generators.hpp"
#include "pcii/matrix_io.hpp"

namespace pcii {

// --- enums --------------------------------------------------------------------

AxiomId parse_axiom(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s.size() == 1) s = "A" + s;
  for (AxiomId a : kAllAxioms) {
    if (s == to_string(a)) return a;
  }
  throw Error(ErrorCode::UnknownAxiom, "unknown axiom '" + std::string(text) + "'");
}

std::string_view to_string(AxiomId axiom) {
  switch (axiom) {
    case AxiomId::A1: return "A1";
    case AxiomId::A2: return "A2";
    case AxiomId::A3: return "A3";
    case AxiomId::A4: return "A4";
    case AxiomId::A5: return "A5";
  }
  return "?";
}

std::string_view axiom_title(AxiomId axiom) {
  switch (axiom) {
    case AxiomId::A1: return "CONSISTENCY_DETECTION";
    case AxiomId::A2: return "NORMALIZATION";
    case AxiomId::A3: return "ERROR_INTOLERANCE";
    case AxiomId::A4: return "MONOTONICITY";
    case AxiomId::A5: return "ORDER_INVARIANCE";
  }
  return "?";
}

std::string_view to_string(DistanceKind d) {
  return d == DistanceKind::LogAbs ? "log" : "abs";
}

DistanceKind parse_distance(std::string_view text) {
  if (text == "log") return DistanceKind::LogAbs;
  if (text == "abs") return DistanceKind::AbsDiff;
  throw Error(ErrorCode::ParseError, "distance must be 'log' or 'abs'");
}

double distance(DistanceKind d, double a, double b) {
  return d == DistanceKind::LogAbs ? std::abs(std::log(a) - std::log(b)) : std::abs(a - b);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "PASS") return Verdict::Pass;
  if (text == "FAIL") return Verdict::Fail;
  if (text == "INCONCLUSIVE") return Verdict::Inconclusive;
  throw Error(ErrorCode::ParseError, "unknown verdict '" + std::string(text) + "'");
}

std::string_view to_string(TriadErrorConvention c) {
  return c == TriadErrorConvention::ProductAsTruth ? "product_as_truth" : "middle_over_product";
}

void AxiomCheckConfig::validate() const {
  if (samples == 0) throw Error(ErrorCode::ParseError, "samples must be positive");
  if (max_order < 4) throw Error(ErrorCode::ParseError, "max_order must be at least 4");
  if (distances.empty()) throw Error(ErrorCode::ParseError, "no A3 distance configured");
  for (double phi : phi_grid) {
    if (!(phi > 0.0)) throw Error(ErrorCode::ParseError, "phi values must be positive");
  }
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::ParseError, "tolerance must be >= 0");
}

namespace {

using Probe = std::optional<Counterexample>;

double value_of(const IndicatorId& id, const PcMatrix& a) { return evaluate(id, a).value; }

std::string num(double v) { return format_number(v, 6); }

std::size_t cycle_order(std::size_t s, std::size_t lo, std::size_t hi) {
  return lo + s % (hi - lo + 1);
}

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

// Known counterexamples, tried before random search.
struct Corpus {
  PcMatrix ii2_witness = PcMatrix::validate({{1, 1, 9}, {1, 1, 1}, {1.0 / 9, 1, 1}});
  PcMatrix ci_c = PcMatrix::validate({{1, 1.0 / 9, 9}, {9, 1, 1.0 / 9}, {1.0 / 9, 9, 1}});
  PcMatrix ci_a = PcMatrix::validate(
      {{1, 2, 0.5, 2}, {0.5, 1, 2, 0.5}, {2, 0.5, 1, 2}, {0.5, 2, 0.5, 1}});
  PcMatrix ii4_b = PcMatrix::validate(
      {{1, 1, 1, 1}, {1, 1, 2, 1}, {1, 0.5, 1, 3}, {1, 1, 1.0 / 3, 1}});
  PcMatrix ii5_a = PcMatrix::validate({{1, 2, 1}, {0.5, 1, 1}, {1, 1, 1}});

  std::vector<PcMatrix> consistent() const {
    return {PcMatrix::ones(3), PcMatrix::from_weights(std::vector<double>{1, 2, 4}),
            PcMatrix::ones(4)};
  }
  std::vector<PcMatrix> inconsistent() const { return {ii5_a, ci_c}; }
  std::vector<PcMatrix> normalization() const { return {ii2_witness, ci_c, PcMatrix::ones(3)}; }
  // The pair known to break `kind` comes first, so its witness is reported.
  std::vector<std::pair<PcMatrix, SubmatrixSelector>> monotonicity(IndicatorKind kind) const {
    std::vector<std::pair<PcMatrix, SubmatrixSelector>> out{
        {ci_a, SubmatrixSelector::make({0, 1, 2}, 4)},
        {ii4_b, SubmatrixSelector::make({1, 2, 3}, 4)}};
    if (kind == IndicatorKind::II4) std::swap(out[0], out[1]);
    return out;
  }
  std::vector<std::pair<PcMatrix, Permutation>> order() const {
    return {{ii5_a, Permutation::swap(3, 0, 1)}};
  }
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

class Checker {
 public:
  Checker(AxiomId axiom, const IndicatorId& id, const AxiomCheckConfig& cfg)
      : id_(id), cfg_(cfg),
        stream_(derive_seed(cfg.rng_seed, {static_cast<std::uint64_t>(axiom) + 1,
                                           stable_hash(id.name())})) {
    report_.axiom = axiom;
    report_.indicator = id;
    report_.error_convention = cfg.error_convention;
  }

  AxiomReport run() {
    switch (report_.axiom) {
      case AxiomId::A1: a1(); break;
      case AxiomId::A2: a2(); break;
      case AxiomId::A3: a3(); break;
      case AxiomId::A4: a4(); break;
      case AxiomId::A5: a5(); break;
    }
    if (report_.counterexample) report_.verdict = Verdict::Fail;
    return report_;
  }

 private:
  std::uint64_t seed(std::uint64_t a, std::uint64_t b) const { return derive_seed(stream_, {a, b}); }

  bool fail(Probe p) {
    if (!p) return false;
    p->tolerance = cfg_.tolerance;
    report_.counterexample = std::move(p);
    return true;
  }

  // --- A1 -------------------------------------------------------------------

  Probe probe_consistent(const PcMatrix& m, const std::string& label) {
    ++report_.trials;
    const double v = value_of(id_, m);
    if (std::abs(v) <= cfg_.tolerance) return std::nullopt;
    return Counterexample{"consistent matrix has ii = " + num(v) + ", expected 0",
                          {{label, m, v}}, {}, {}, {}, {}, 0.0};
  }

  Probe probe_inconsistent(const PcMatrix& m, const std::string& label) {
    ++report_.trials;
    const double v = value_of(id_, m);
    if (v > 0.0) return std::nullopt;
    return Counterexample{"inconsistent matrix has ii = " + num(v) + ", expected > 0",
                          {{label, m, v}}, {}, {}, {}, {}, 0.0};
  }

  void a1() {
    if (cfg_.use_regression_corpus) {
      for (const auto& m : corpus().consistent())
        if (fail(probe_consistent(m, "A"))) return;
      for (const auto& m : corpus().inconsistent())
        if (fail(probe_inconsistent(m, "A"))) return;
    }
    for (std::size_t s = 0; s < cfg_.samples; ++s) {
      ++report_.samples;
      const std::size_t n = cycle_order(s, 3, cfg_.max_order);
      const auto c = random_consistent_matrix(n, cfg_.spread, seed(s, 0));
      if (fail(probe_consistent(c, "A"))) return;
      Rng rng(seed(s, 1));
      const auto p = perturb(c, rng);
      if (fail(probe_inconsistent(p.matrix, "A"))) return;
    }
  }

  // --- A2 -------------------------------------------------------------------

  Probe probe_range(const PcMatrix& m) {
    ++report_.trials;
    const double v = value_of(id_, m);
    if (v >= -cfg_.tolerance && v <= 1.0 + cfg_.tolerance) return std::nullopt;
    return Counterexample{"ii = " + num(v) + " outside [0, 1]", {{"A", m, v}}, {}, {}, {}, {}, 0.0};
  }

  void a2() {
    if (cfg_.use_regression_corpus) {
      for (const auto& m : corpus().normalization())
        if (fail(probe_range(m))) return;
    }
    for (std::size_t s = 0; s < cfg_.samples; ++s) {
      ++report_.samples;
      const std::size_t n = cycle_order(s, 3, cfg_.max_order);
      if (fail(probe_range(random_pc_matrix(n, cfg_.spread, seed(s, 0))))) return;
      if (fail(probe_range(random_consistent_matrix(n, cfg_.spread, seed(s, 1))))) return;
    }
  }

  // --- A4 -------------------------------------------------------------------

  Probe probe_submatrix(const PcMatrix& a, double va, const SubmatrixSelector& sel) {
    ++report_.trials;
    const PcMatrix b = submatrix(a, sel);
    const double vb = value_of(id_, b);
    if (vb <= va + cfg_.tolerance) return std::nullopt;
    std::vector<std::size_t> idx(sel.indices().begin(), sel.indices().end());
    return Counterexample{"submatrix B has ii(B) = " + num(vb) + " > ii(A) = " + num(va),
                          {{"A", a, va}, {"B", b, vb}}, idx, {}, {}, {}, 0.0};
  }

  void a4() {
    if (cfg_.use_regression_corpus) {
      for (const auto& [a, sel] : corpus().monotonicity(id_.kind()))
        if (fail(probe_submatrix(a, value_of(id_, a), sel))) return;
    }
    for (std::size_t s = 0; s < cfg_.samples; ++s) {
      ++report_.samples;
      const std::size_t n = cycle_order(s, 4, cfg_.max_order);
      const auto a = random_pc_matrix(n, cfg_.spread, seed(s, 0));
      const double va = value_of(id_, a);
      for (std::size_t m = 3; m < n; ++m) {
        if (n <= cfg_.exhaustive_order) {
          for (const auto& sel : enumerate_selectors(n, m))
            if (fail(probe_submatrix(a, va, sel))) return;
        } else {
          Rng rng(seed(s, 2 + m));
          for (std::size_t k = 0; k < cfg_.sampled_selectors; ++k) {
            const auto sel = SubmatrixSelector::make(random_subset(n, m, rng), n);
            if (fail(probe_submatrix(a, va, sel))) return;
          }
        }
      }
    }
  }

  // --- A5 -------------------------------------------------------------------

  Probe probe_permutation(const PcMatrix& a, double va, const Permutation& p) {
    ++report_.trials;
    const PcMatrix pa = permute(a, p);
    const double vp = value_of(id_, pa);
    if (std::abs(vp - va) <= cfg_.tolerance) return std::nullopt;
    std::vector<std::size_t> images(p.images().begin(), p.images().end());
    return Counterexample{"relabelling changes ii from " + num(va) + " to " + num(vp),
                          {{"A", a, va}, {"P", pa, vp}}, {}, images, {}, {}, 0.0};
  }

  std::vector<Permutation> permutations_for(std::size_t n, std::uint64_t s) const {
    std::vector<Permutation> out;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    const std::size_t want = std::min(factorial(n), std::max<std::size_t>(cfg_.samples, 1));
    if (want == factorial(n)) {
      do out.push_back(Permutation::make(p));
      while (std::next_permutation(p.begin(), p.end()));
      return out;
    }
    Rng rng(seed(s, 1));
    std::set<std::vector<std::size_t>> seen;
    while (seen.size() < want) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(p[i], p[pick(rng)]);
      }
      if (seen.insert(p).second) out.push_back(Permutation::make(p));
    }
    return out;
  }

  void a5() {
    if (cfg_.use_regression_corpus) {
      for (const auto& [a, p] : corpus().order())
        if (fail(probe_permutation(a, value_of(id_, a), p))) return;
    }
    for (std::size_t s = 0; s < cfg_.samples; ++s) {
      ++report_.samples;
      const std::size_t n = cycle_order(s, 3, cfg_.max_order);
      const auto a = random_pc_matrix(n, cfg_.spread, seed(s, 0));
      const double va = value_of(id_, a);
      for (const auto& p : permutations_for(n, s))
        if (fail(probe_permutation(a, va, p))) return;
    }
  }

  // --- A3 -------------------------------------------------------------------

  struct Family {
    std::string name;
    std::vector<EmbeddingSpec> members;  // in escalation order
  };

  static bool in_bounds(double v) { return v > kMinEntry && v < kMaxEntry; }

  std::vector<Family> families(DistanceKind d, double phi) const {
    std::vector<Triad> bases;
    if (d == DistanceKind::LogAbs) {
      bases = {{1, std::exp(phi + 0.5), 1}, {1, std::exp(-(phi + 0.5)), 1}};
    } else {
      const double s = std::sqrt(2 * phi + 1);
      bases = {{1, phi + 1.5, 1}, {s, phi + 0.5, s}};
    }
    std::vector<Family> out;
    const char* side[] = {"above", "below"};
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const Triad t = bases[b];
      const std::string tag = std::string("(") + side[b] + ")";
      Family up{"shift t->inf " + tag, {}}, down{"shift t->0 " + tag, {}};
      Family big{"scale t->inf " + tag, {}}, small{"scale t->0 " + tag, {}};
      for (int k = 0; k <= 50; ++k) {
        const double u = std::ldexp(1.0, k), v = std::ldexp(1.0, -k);
        up.members.push_back({{u * t.x, t.y, t.z / u}, 3, {}});
        down.members.push_back({{v * t.x, t.y, t.z / v}, 3, {}});
        big.members.push_back({{u * t.x, u * u * t.y, u * t.z}, 3, {}});
        small.members.push_back({{v * t.x, v * v * t.y, v * t.z}, 3, {}});
      }
      Family embed{"embedding n->" + std::to_string(cfg_.max_order) + " " + tag, {}};
      for (std::size_t n = 3; n <= cfg_.max_order; ++n) embed.members.push_back({t, n, {}});
      for (auto* f : {&up, &down, &big, &small, &embed}) out.push_back(std::move(*f));
    }
    Family power{"(2^n, 4^n + c, 2^n)", {}};
    for (int n = 0; n <= 30; ++n) {
      const double p = std::ldexp(1.0, n);
      power.members.push_back({{p, p * p + cfg_.embed_constant, p}, 3, {}});
    }
    out.push_back(std::move(power));
    return out;
  }

  // Triads within kTriadEqualityTolerance of consistency count as consistent
  // for A1, so A3 cannot demand that they be detected.
  static bool premise(DistanceKind d, double phi, const Triad& t) {
    return in_bounds(t.x) && in_bounds(t.y) && in_bounds(t.z) && in_bounds(t.x * t.z) &&
           std::abs(t.x * t.z / t.y - 1.0) > kTriadEqualityTolerance &&
           distance(d, t.y, t.x * t.z) > phi;
  }

  Counterexample a3_witness(const PcMatrix& m, double v, DistanceKind d, double phi) const {
    return Counterexample{"triad at " + std::string(to_string(d)) + "-distance > " + num(phi) +
                              " has ii = " + num(v),
                          {{"A", m, v}}, {}, {}, phi, d, cfg_.tolerance};
  }

  DistanceReport a3_distance(DistanceKind d, std::size_t d_index, Probe& witness) {
    DistanceReport dr{d, Verdict::Pass, {}, ""};
    bool inconclusive = false;
    for (std::size_t pi = 0; pi < cfg_.phi_grid.size(); ++pi) {
      const double phi = cfg_.phi_grid[pi];
      PhiRow row{phi, std::numeric_limits<double>::infinity(), 0.0, 0};

      Rng rng(seed(100 + d_index, pi));
      std::uniform_real_distribution<double> u(0.0, 2.0);
      std::bernoulli_distribution above(0.5);
      for (std::size_t s = 0; s < cfg_.samples; ++s) {
        const double x = log_uniform(rng, cfg_.spread);
        const double z = log_uniform(rng, cfg_.spread);
        const double gap = phi + (2.0 - u(rng));  // in (phi, phi + 2]
        const bool up = above(rng);
        double y;
        if (d == DistanceKind::LogAbs) {
          y = x * z * std::exp(up ? gap : -gap);
        } else {
          y = (up || x * z <= gap) ? x * z + gap : x * z - gap;
        }
        const Triad t{x, y, z};
        if (!premise(d, phi, t)) continue;
        ++report_.samples;
        for (std::size_t n = 3; n <= cfg_.max_order; ++n) {
          const PcMatrix m = embed_triad({t, n, {}});
          const double v = value_of(id_, m);
          ++report_.trials;
          ++row.trials;
          if (v < row.floor) {
            row.floor = v;
            row.relative_error = triad_relative_error(t, cfg_.error_convention);
          }
          if (v <= cfg_.tolerance && !witness) witness = a3_witness(m, v, d, phi);
        }
      }
      if (row.trials == 0) row.floor = 0.0;
      dr.rows.push_back(row);

      for (const auto& family : families(d, phi)) {
        std::vector<double> values;
        for (const auto& spec : family.members) {
          if (!premise(d, phi, spec.triad)) continue;
          const PcMatrix m = embed_triad(spec);
          const double v = value_of(id_, m);
          ++report_.trials;
          values.push_back(v);
          if (v <= cfg_.tolerance && !witness) {
            witness = a3_witness(m, v, d, phi);
            dr.note = "phi " + num(phi) + ": " + family.name + " reaches ii = " + num(v);
          }
        }
        if (values.size() < 3 || witness) continue;
        const std::size_t k = values.size();
        const bool decreasing = values[k - 1] < values[k - 2] * (1 - 1e-9) &&
                                values[k - 2] < values[k - 3] * (1 - 1e-9);
        if (decreasing && !inconclusive) {
          inconclusive = true;
          dr.note = "phi " + num(phi) + ": " + family.name + " still decreasing at ii = " +
                    num(values.back());
        }
      }
    }
    if (witness) {
      dr.verdict = Verdict::Fail;
      if (dr.note.empty()) dr.note = witness->description;
    } else if (inconclusive) {
      dr.verdict = Verdict::Inconclusive;
    }
    return dr;
  }

  void a3() {
    std::optional<Counterexample> first_witness;
    bool any_pass = false, any_inconclusive = false;
    for (std::size_t di = 0; di < cfg_.distances.size(); ++di) {
      Probe witness;
      auto dr = a3_distance(cfg_.distances[di], di, witness);
      any_pass = any_pass || dr.verdict == Verdict::Pass;
      any_inconclusive = any_inconclusive || dr.verdict == Verdict::Inconclusive;
      if (witness && !first_witness) first_witness = std::move(witness);
      report_.phi_table.push_back(std::move(dr));
    }
    if (any_pass) {
      report_.verdict = Verdict::Pass;
    } else if (any_inconclusive) {
      report_.verdict = Verdict::Inconclusive;
    } else {
      report_.counterexample = std::move(first_witness);
    }
  }

  const IndicatorId& id_;
  const AxiomCheckConfig& cfg_;
  std::uint64_t stream_;
  AxiomReport report_;
};

}  // namespace

AxiomReport check_axiom(AxiomId axiom, const IndicatorId& id, const AxiomCheckConfig& cfg) {
  cfg.validate();
  return Checker(axiom, id, cfg).run();
}

bool reverify(const AxiomReport& r) {
  if (r.verdict != Verdict::Fail) return true;
  if (!r.counterexample) return false;
  const auto& ce = *r.counterexample;
  const auto& w = ce.witnesses;
  const double tol = ce.tolerance;
  const auto& id = r.indicator;
  try {
    for (const auto& wi : w) {
      if (value_of(id, wi.matrix) != wi.value) return false;
    }
    switch (r.axiom) {
      case AxiomId::A1: {
        if (w.size() != 1) return false;
        if (is_consistent(w[0].matrix)) return std::abs(w[0].value) > tol;
        return !(w[0].value > 0.0);
      }
      case AxiomId::A2:
        return w.size() == 1 && (w[0].value < -tol || w[0].value > 1.0 + tol);
      case AxiomId::A3: {
        if (w.size() != 1 || !ce.phi || !ce.distance || w[0].value > tol) return false;
        const auto& m = w[0].matrix;
        for (const auto& t : triads(m.order())) {
          const Triad tr = triad_at(m, t);
          if (distance(*ce.distance, tr.y, tr.x * tr.z) > *ce.phi) return true;
        }
        return false;
      }
      case AxiomId::A4: {
        if (w.size() != 2) return false;
        const auto sel = SubmatrixSelector::make(ce.selector, w[0].matrix.order());
        return submatrix(w[0].matrix, sel) == w[1].matrix && w[1].value > w[0].value + tol;
      }
      case AxiomId::A5: {
        if (w.size() != 2) return false;
        const auto p = Permutation::make(ce.permutation);
        return permute(w[0].matrix, p) == w[1].matrix &&
               std::abs(w[1].value - w[0].value) > tol;
      }
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

// --- suites -------------------------------------------------------------------

std::vector<IndicatorId> independence_indicators() {
  using K = IndicatorKind;
  return {IndicatorId::of(K::II1), IndicatorId::of(K::II2), IndicatorId::of(K::II3),
          IndicatorId::of(K::II4), IndicatorId::of(K::II5)};
}

ReportGrid independence_grid(const AxiomCheckConfig& cfg) {
  cfg.validate();
  const auto ids = independence_indicators();
  std::vector<std::vector<std::future<AxiomReport>>> futures(ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    for (AxiomId a : kAllAxioms) {
      futures[j].push_back(std::async(std::launch::async, [a, &ids, j, &cfg] {
        return check_axiom(a, ids[j], cfg);
      }));
    }
  }
  ReportGrid grid(ids.size());
  for (std::size_t j = 0; j < ids.size(); ++j) {
    for (auto& f : futures[j]) grid[j].push_back(f.get());
  }
  return grid;
}

std::vector<std::string> independence_deviations(const ReportGrid& grid) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t k = 0; k < grid[j].size(); ++k) {
      const auto& r = grid[j][k];
      const Verdict expected = j == k ? Verdict::Fail : Verdict::Pass;
      const std::string cell = r.indicator.name() + "/" + std::string(to_string(r.axiom));
      if (r.verdict != expected) {
        out.push_back(cell + ": expected " + std::string(to_string(expected)) + ", got " +
                      std::string(to_string(r.verdict)));
      } else if (!reverify(r)) {
        out.push_back(cell + ": counterexample does not reverify");
      }
    }
  }
  return out;
}

ReportGrid run_independence_suite(const AxiomCheckConfig& cfg) {
  auto grid = independence_grid(cfg);
  const auto deviations = independence_deviations(grid);
  if (!deviations.empty()) {
    std::vector<AxiomReport> flat;
    for (const auto& row : grid) flat.insert(flat.end(), row.begin(), row.end());
    throw SuiteViolation("independence suite deviates at " + deviations.front(), std::move(flat));
  }
  return grid;
}

std::vector<AxiomReport> run_consistency_suite(const AxiomCheckConfig& cfg) {
  const auto kii = IndicatorId::of(IndicatorKind::Kii);
  std::vector<AxiomReport> reports;
  for (AxiomId a : kAllAxioms) reports.push_back(check_axiom(a, kii, cfg));
  for (const auto& r : reports) {
    if (r.verdict != Verdict::Pass) {
      throw SuiteViolation("kii/" + std::string(to_string(r.axiom)) + ": expected PASS, got " +
                               std::string(to_string(r.verdict)),
                           reports);
    }
  }
  return reports;
}

// --- serialization -------------------------------------------------------------

namespace {

using nlohmann::json;

struct Rounder {
  std::optional<int> digits;
  double operator()(double v) const {
    return digits ? std::strtod(format_number(v, *digits).c_str(), nullptr) : v;
  }
};

json matrix_json(const PcMatrix& m, const Rounder& r) {
  auto rows = m.rows();
  for (auto& row : rows)
    for (auto& v : row) v = r(v);
  return {{"n", m.order()}, {"rows", rows}};
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
  std::vector<std::size_t> out(v);
  for (auto& x : out) ++x;
  return out;
}

std::vector<std::size_t> zero_based(const json& j) {
  std::vector<std::size_t> out;
  for (const auto& x : j) {
    const auto v = x.get<std::size_t>();
    if (v == 0) throw Error(ErrorCode::ParseError, "indices are 1-based");
    out.push_back(v - 1);
  }
  return out;
}

TriadErrorConvention parse_convention(std::string_view s) {
  if (s == "product_as_truth") return TriadErrorConvention::ProductAsTruth;
  if (s == "middle_over_product") return TriadErrorConvention::MiddleOverProduct;
  throw Error(ErrorCode::ParseError, "unknown error convention '" + std::string(s) + "'");
}

}  // namespace

json report_to_json(const AxiomReport& r, std::optional<int> significant_digits) {
  const Rounder round{significant_digits};
  json j{{"axiom", to_string(r.axiom)},
         {"indicator", r.indicator.name()},
         {"verdict", to_string(r.verdict)},
         {"samples", r.samples},
         {"trials", r.trials},
         {"error_convention", to_string(r.error_convention)}};
  if (r.counterexample) {
    const auto& ce = *r.counterexample;
    json witnesses = json::array();
    for (const auto& w : ce.witnesses) {
      witnesses.push_back(
          {{"label", w.label}, {"value", round(w.value)}, {"matrix", matrix_json(w.matrix, round)}});
    }
    json c{{"description", ce.description},
           {"tolerance", ce.tolerance},
           {"witnesses", witnesses}};
    if (!ce.selector.empty()) c["selector"] = one_based(ce.selector);
    if (!ce.permutation.empty()) c["permutation"] = one_based(ce.permutation);
    if (ce.phi) c["phi"] = *ce.phi;
    if (ce.distance) c["distance"] = to_string(*ce.distance);
    j["counterexample"] = c;
  }
  if (!r.phi_table.empty()) {
    json table = json::array();
    for (const auto& d : r.phi_table) {
      json rows = json::array();
      for (const auto& row : d.rows) {
        rows.push_back({{"phi", row.phi},
                        {"floor", round(row.floor)},
                        {"relative_error", round(row.relative_error)},
                        {"trials", row.trials}});
      }
      table.push_back({{"distance", to_string(d.distance)},
                       {"verdict", to_string(d.verdict)},
                       {"note", d.note},
                       {"rows", rows}});
    }
    j["phi_table"] = table;
  }
  return j;
}

AxiomReport report_from_json(const json& j) {
  try {
    AxiomReport r;
    r.axiom = parse_axiom(j.at("axiom").get<std::string>());
    r.indicator = IndicatorId::parse(j.at("indicator").get<std::string>());
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    r.samples = j.at("samples").get<std::size_t>();
    r.trials = j.at("trials").get<std::size_t>();
    r.error_convention = parse_convention(j.at("error_convention").get<std::string>());
    if (j.contains("counterexample")) {
      const auto& c = j["counterexample"];
      Counterexample ce;
      ce.description = c.at("description").get<std::string>();
      ce.tolerance = c.at("tolerance").get<double>();
      for (const auto& w : c.at("witnesses")) {
        ce.witnesses.push_back({w.at("label").get<std::string>(),
                                PcMatrix::validate(parse_json_matrix(w.at("matrix"))),
                                w.at("value").get<double>()});
      }
      if (c.contains("selector")) ce.selector = zero_based(c["selector"]);
      if (c.contains("permutation")) ce.permutation = zero_based(c["permutation"]);
      if (c.contains("phi")) ce.phi = c["phi"].get<double>();
      if (c.contains("distance")) ce.distance = parse_distance(c["distance"].get<std::string>());
      r.counterexample = std::move(ce);
    }
    if (j.contains("phi_table")) {
      for (const auto& d : j["phi_table"]) {
        DistanceReport dr;
        dr.distance = parse_distance(d.at("distance").get<std::string>());
        dr.verdict = parse_verdict(d.at("verdict").get<std::string>());
        dr.note = d.at("note").get<std::string>();
        for (const auto& row : d.at("rows")) {
          dr.rows.push_back({row.at("phi").get<double>(), row.at("floor").get<double>(),
                             row.at("relative_error").get<double>(),
                             row.at("trials").get<std::size_t>()});
        }
        r.phi_table.push_back(std::move(dr));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report JSON: ") + e.what());
  }
}

}  // namespace pcii
