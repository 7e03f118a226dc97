// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pcii/eigen.hpp"
#include "pcii/generators.hpp"
#include "pcii/harness.hpp"
#include "pcii/indicators.hpp"

using namespace pcii;

namespace {

IndicatorId id(std::string_view s) { return IndicatorId::parse(s); }

// Collects failed conditions for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(17);
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(s.str());
    }
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Check&)> body;
};

PcMatrix ci_a4_matrix() {
  return PcMatrix::validate({{1, 2, 0.5, 2}, {0.5, 1, 2, 0.5}, {2, 0.5, 1, 2}, {0.5, 2, 0.5, 1}});
}

void eigenvalue_regression(Check& c) {
  const auto a = ci_a4_matrix();
  const auto b1 = PcMatrix::validate({{1, 2, 0.5}, {0.5, 1, 2}, {2, 0.5, 1}});
  const auto b2 = PcMatrix::validate({{1, 0.5, 2}, {2, 1, 2}, {0.5, 0.5, 1}});
  const auto b3 = PcMatrix::validate({{1, 2, 2}, {0.5, 1, 0.5}, {0.5, 2, 1}});
  const auto cm = PcMatrix::validate({{1, 1.0 / 9, 9}, {9, 1, 1.0 / 9}, {1.0 / 9, 9, 1}});

  c.near(principal_eigenvalue(a), 4.64474, 1e-4, "lambda_A");
  c.near(principal_eigenvalue(b1), 3.5, 1e-9, "lambda_B1");
  c.near(principal_eigenvalue(b2), 3.05362, 1e-4, "lambda_B2");
  c.near(principal_eigenvalue(b3), 3.05362, 1e-4, "lambda_B3");
  c.near(principal_eigenvalue(cm), 10.111, 1e-3, "lambda_C");

  const auto ci = id("ci");
  c.near(evaluate(ci, a).value, 0.215, 1e-3, "CI(A)");
  c.near(evaluate(ci, b1).value, 0.25, 1e-9, "CI(B1)");
  c.near(evaluate(ci, b2).value, 0.02681, 1e-4, "CI(B2)");
  c.near(evaluate(ci, b3).value, 0.02681, 1e-4, "CI(B3)");
  c.near(evaluate(ci, cm).value, 3.555, 1e-3, "CI(C)");

  // B1..B3 are the principal 3 x 3 submatrices of A containing row 1.
  c.expect(submatrix(a, SubmatrixSelector::make({0, 1, 2}, 4)) == b1, "B1 is a submatrix of A");
}

void independence_grid_check(Check& c) {
  const auto ii2 = PcMatrix::validate({{1, 1, 9}, {1, 1, 1}, {1.0 / 9, 1, 1}});
  c.near(evaluate(id("ii2"), ii2).value, 16.0 / 9, 1e-12, "ii2 witness");

  const auto a5 = PcMatrix::validate({{1, 2, 1}, {0.5, 1, 1}, {1, 1, 1}});
  c.near(evaluate(id("ii5"), a5).value, 4.0 / 5, 1e-12, "ii5(A)");
  c.near(evaluate(id("ii5"), permute(a5, Permutation::swap(3, 0, 1))).value, 5.0 / 7, 1e-12,
         "ii5(PAP^T)");

  const auto b4 = PcMatrix::validate({{1, 1, 1, 1}, {1, 1, 2, 1}, {1, 0.5, 1, 3}, {1, 1, 1.0 / 3, 1}});
  c.near(evaluate(id("ii4"), b4).value, 1.0 / 2, 1e-12, "ii4(B)");
  c.near(evaluate(id("ii4"), submatrix(b4, SubmatrixSelector::make({1, 2, 3}, 4))).value, 11.0 / 12,
         1e-12, "ii4(A)");

  const auto grid = independence_grid();
  for (const auto& d : independence_deviations(grid)) c.expect(false, d);
  for (const auto& row : grid) {
    for (const auto& r : row) {
      if (r.verdict == Verdict::Fail) {
        c.expect(reverify(r), r.indicator.name() + "/" + std::string(to_string(r.axiom)) +
                                  " counterexample does not reverify");
      }
    }
  }
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void consistency_suite(Check& c) {
  const auto kii = id("kii");

  AxiomCheckConfig base;
  for (AxiomId a : {AxiomId::A1, AxiomId::A2}) {
    const auto r = check_axiom(a, kii, base);
    c.expect(r.verdict == Verdict::Pass, std::string(to_string(a)) + " verdict " + std::string(to_string(r.verdict)));
  }

  AxiomCheckConfig search = base;
  search.use_regression_corpus = false;

  AxiomCheckConfig a4 = search;
  a4.samples = 200;
  a4.max_order = 6;
  a4.exhaustive_order = 6;
  const auto r4 = check_axiom(AxiomId::A4, kii, a4);
  c.expect(r4.verdict == Verdict::Pass, "A4 verdict " + std::string(to_string(r4.verdict)));
  std::size_t want4 = 0;
  for (std::size_t s = 0; s < a4.samples; ++s) {
    const std::size_t n = 4 + s % 3;
    for (std::size_t m = 3; m < n; ++m) want4 += binom(n, m);
  }
  c.expect(r4.trials == want4, "A4 exhaustive trials " + std::to_string(r4.trials) + " != " + std::to_string(want4));

  AxiomCheckConfig a5 = search;
  a5.samples = 100;
  a5.max_order = 7;
  const auto r5 = check_axiom(AxiomId::A5, kii, a5);
  c.expect(r5.verdict == Verdict::Pass, "A5 verdict " + std::string(to_string(r5.verdict)));
  // 20 matrices at each order 3..7: all 6 and all 24 permutations, then 100 sampled.
  const std::size_t want5 = 20 * (6 + 24 + 100 + 100 + 100);
  c.expect(r5.trials == want5, "A5 trials " + std::to_string(r5.trials) + " != " + std::to_string(want5));

  AxiomCheckConfig a3 = base;
  a3.distances = {DistanceKind::LogAbs};
  const auto r3 = check_axiom(AxiomId::A3, kii, a3);
  c.expect(r3.verdict == Verdict::Pass, "A3 verdict " + std::string(to_string(r3.verdict)));
  const std::array<double, 4> phis{0.5, 1, 2, 5};
  if (r3.phi_table.size() != 1 || r3.phi_table[0].rows.size() != phis.size()) {
    c.expect(false, "A3 phi table shape");
    return;
  }
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto& row = r3.phi_table[0].rows[i];
    c.near(row.phi, phis[i], 0.0, "A3 phi grid");
    c.near(row.floor, 1 - std::exp(-phis[i]), 0.02, "A3 floor at phi " + std::to_string(phis[i]));
  }
}

void ci_failures_by_search(Check& c) {
  AxiomCheckConfig cfg;
  cfg.use_regression_corpus = false;
  cfg.samples = 10000;
  cfg.rng_seed = 1;
  for (AxiomId a : {AxiomId::A4, AxiomId::A2}) {
    const auto r = check_axiom(a, id("ci"), cfg);
    const std::string tag = "CI/" + std::string(to_string(a));
    c.expect(r.verdict == Verdict::Fail, tag + " verdict " + std::string(to_string(r.verdict)));
    c.expect(r.counterexample.has_value() && reverify(r), tag + " witness does not reverify");
  }
}

void error_tolerance(Check& c) {
  // CI of (1, 10, 1) embedded in an otherwise all-ones matrix of order n.
  const std::array<double, 8> ci_table{
      0.30929678669658145, 0.24182569168282816, 0.1845097400112936,  0.14358381000238704,
      0.11427306561250757, 0.09279966653157905, 0.07668835039066901, 0.06433429572039688};
  double previous = HUGE_VAL;
  for (std::size_t n = 3; n <= 10; ++n) {
    const auto a = embed_triad({Triad{1, 10, 1}, n, {}});
    const std::string at = " at n = " + std::to_string(n);
    c.near(evaluate(id("kii"), a).value, 0.9, 1e-12, "Kii" + at);
    const double ci = evaluate(id("ci"), a).value;
    c.near(ci, ci_table[n - 3], 1e-9, "CI" + at);
    c.expect(ci < previous, "CI not decreasing" + at);
    previous = ci;
  }
}

void scaling_invariance(Check& c) {
  Rng rng(derive_seed(1, {stable_hash("scaling")}));
  const auto kii = id("kii");
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const auto a = random_pc_matrix(n, std::log(9.0), rng());
    std::vector<double> lambda(n);
    for (auto& l : lambda) l = log_uniform(rng, std::log(100.0));
    const auto s = scale_action(a, ScalingVector::make(lambda));
    worst = std::max(worst, std::abs(evaluate(kii, s).value - evaluate(kii, a).value));
  }
  c.near(worst, 0.0, 1e-10, "max |Kii(scaled) - Kii|");

  const auto a = PcMatrix::from_upper(3, std::vector<double>{1, 2, 3});
  const auto s = scale_action(a, ScalingVector::make({1, 2, 3}));
  c.near(invariant_map(InvariantKind::Diff, triad_at(a, {})), 1.0, 1e-15, "xz - y before scaling");
  c.near(invariant_map(InvariantKind::Diff, triad_at(s, {})), 1.0 / 3, 1e-15, "xz - y after scaling");
}

void eigen_closed_form(Check& c) {
  Rng rng(derive_seed(1, {stable_hash("closed-form")}));
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_pc_matrix(3, std::log(9.0), rng());
    const double cc = std::cbrt(a(0, 1) * a(1, 2) / a(0, 2));
    worst = std::max(worst, std::abs(principal_eigenvalue(a) - (1 + cc + 1 / cc)));
  }
  c.near(worst, 0.0, 1e-8, "max |power iteration - closed form|");
}

void kii_surface(Check& c) {
  const std::array<double, 5> axis{1, 1.5, 2, 2.5, 3};
  // Rows by x, columns by z.
  const double table[5][5] = {
      {1.0 / 3, 0, 1.0 / 4, 2.0 / 5, 1.0 / 2},
      {0, 1.0 / 3, 1.0 / 2, 3.0 / 5, 2.0 / 3},
      {1.0 / 4, 1.0 / 2, 5.0 / 8, 7.0 / 10, 3.0 / 4},
      {2.0 / 5, 3.0 / 5, 7.0 / 10, 19.0 / 25, 4.0 / 5},
      {1.0 / 2, 2.0 / 3, 3.0 / 4, 4.0 / 5, 5.0 / 6},
  };
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 5; ++k) {
      const double x = axis[i], z = axis[k];
      std::ostringstream what;
      what << "Kii(" << x << ", 1.5, " << z << ")";
      c.near(kii_triad({x, 1.5, z}), table[i][k], 1e-12, what.str());
      c.near(evaluate(id("kii"), PcMatrix::from_upper(3, std::vector<double>{x, 1.5, z})).value,
             table[i][k], 1e-12, what.str() + " via matrix");
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"eigenvalue regression", 1, eigenvalue_regression},
      {"independence grid", 30, independence_grid_check},
      {"Kii axiom-consistency suite", 120, consistency_suite},
      {"CI failures of A4 and A2 found by search", 120, ci_failures_by_search},
      {"error tolerance of (1, 10, 1) embeddings", 10, error_tolerance},
      {"scaling invariance", 10, scaling_invariance},
      {"power iteration vs closed form", 10, eigen_closed_form},
      {"Kii(x, 1.5, z) spot values", 1, kii_surface},
  };

  int failed = 0;
  for (const auto& crit : criteria) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > crit.budget_seconds) {
      std::ostringstream s;
      s << "took " << secs << " s, budget " << crit.budget_seconds << " s";
      c.expect(false, s.str());
    }
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s  %-44s %8.3f s\n", ok ? "PASS" : "FAIL", crit.name.c_str(), secs);
    for (const auto& f : c.failures) std::printf("        %s\n", f.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
