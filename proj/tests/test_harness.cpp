#include <cmath>
#include <set>

#include "doctest.h"
#include "pcii/generators.hpp"
#include "pcii/harness.hpp"

using namespace pcii;

namespace {

IndicatorId id(std::string_view s) { return IndicatorId::parse(s); }

AxiomCheckConfig search_only() {
  AxiomCheckConfig cfg;
  cfg.use_regression_corpus = false;
  return cfg;
}

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("generators") {
  TEST_CASE("seeds") {
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  }

  TEST_CASE("random_pc_matrix") {
    CHECK(random_pc_matrix(4, 0.0, 7) == PcMatrix::ones(4));
    CHECK(random_pc_matrix(5, 1.0, 42) == random_pc_matrix(5, 1.0, 42));
    CHECK_FALSE(random_pc_matrix(5, 1.0, 42) == random_pc_matrix(5, 1.0, 43));
    CHECK_THROWS_AS(random_pc_matrix(2, 1.0, 1), Error);
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto a = random_pc_matrix(5, std::log(9.0), s);
      CHECK(a.is_reciprocal());
      for (double v : a.data()) {
        REQUIRE(v >= 1.0 / 9 * (1 - 1e-15));
        REQUIRE(v <= 9.0 * (1 + 1e-15));
      }
    }
  }

  TEST_CASE("random_consistent_matrix") {
    CHECK(random_consistent_matrix(3, 0.0, 5) == PcMatrix::ones(3));
    for (std::uint64_t s = 0; s < 500; ++s) {
      const auto c = random_consistent_matrix(3 + s % 6, std::log(9.0), s);
      CHECK(is_consistent(c, 1e-12));
      CHECK(evaluate(id("kii"), c).value <= 1e-12);
    }
  }

  TEST_CASE("one entry times 3 gives Kii >= 2/3") {
    for (std::uint64_t s = 0; s < 200; ++s) {
      const std::size_t n = 3 + s % 5;
      const auto c = random_consistent_matrix(n, 2.0, s);
      std::vector<double> upper;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) upper.push_back(c(i, j));
      upper[s % upper.size()] *= 3;
      CHECK(evaluate(id("kii"), PcMatrix::from_upper(n, upper)).value >= 2.0 / 3 - 1e-12);
    }
  }

  TEST_CASE("perturb") {
    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
      const auto c = random_consistent_matrix(3 + trial % 5, 1.0, trial);
      const auto p = perturb(c, rng);
      CHECK(p.factor >= 2.0);
      CHECK(p.factor <= 10.0);
      CHECK(p.i < p.j);
      CHECK(p.matrix(p.i, p.j) == doctest::Approx(c(p.i, p.j) * p.factor));
      CHECK_FALSE(is_consistent(p.matrix));
    }
  }

  TEST_CASE("embed_triad") {
    for (std::size_t n = 3; n <= 10; ++n) {
      const auto m = embed_triad({{1, 10, 1}, n, {}});
      CHECK(triad_at(m, {0, 1, 2}) == Triad{1, 10, 1});
      CHECK(std::abs(evaluate(id("kii"), m).value - 0.9) <= 1e-12);
      for (const auto& t : triads(n)) {
        if (t.i == 0 && t.k == 2) continue;
        if (t.i == 0 && t.j == 2) continue;
        CHECK(kii_triad(triad_at(m, t)) <= 1e-15);
      }
      const auto r = embed_triad({{2, 1, 3}, n, {}}, 77);
      CHECK(std::abs(evaluate(id("kii"), r).value - 5.0 / 6) <= 1e-12);
    }
    CHECK_THROWS_AS(embed_triad({{1, 1, 1}, 2, {}}), Error);
  }

  TEST_CASE("random_subset") {
    Rng rng(3);
    std::set<std::vector<std::size_t>> seen;
    for (int trial = 0; trial < 500; ++trial) {
      const auto s = random_subset(6, 3, rng);
      REQUIRE(s.size() == 3);
      CHECK(s[0] < s[1]);
      CHECK(s[1] < s[2]);
      CHECK(s[2] < 6);
      seen.insert(s);
    }
    CHECK(seen.size() == binom(6, 3));
  }
}

TEST_SUITE("axiom ids and config") {
  TEST_CASE("parse") {
    CHECK(parse_axiom("A3") == AxiomId::A3);
    CHECK(parse_axiom("a4") == AxiomId::A4);
    CHECK(parse_axiom("5") == AxiomId::A5);
    CHECK_THROWS_AS(parse_axiom("A6"), Error);
    CHECK(parse_distance("abs") == DistanceKind::AbsDiff);
    CHECK_THROWS_AS(parse_distance("l2"), Error);
  }

  TEST_CASE("config validation") {
    AxiomCheckConfig cfg;
    cfg.samples = 0;
    CHECK_THROWS_AS(check_axiom(AxiomId::A1, id("kii"), cfg), Error);
    cfg = {};
    cfg.phi_grid = {1.0, -1.0};
    CHECK_THROWS_AS(check_axiom(AxiomId::A3, id("kii"), cfg), Error);
    cfg = {};
    cfg.distances.clear();
    CHECK_THROWS_AS(check_axiom(AxiomId::A3, id("kii"), cfg), Error);
  }
}

TEST_SUITE("check_axiom") {
  TEST_CASE("CI fails A4 with the 4x4 witness") {
    const auto r = check_axiom(AxiomId::A4, id("ci"));
    REQUIRE(r.verdict == Verdict::Fail);
    REQUIRE(r.counterexample);
    const auto& w = r.counterexample->witnesses;
    REQUIRE(w.size() == 2);
    CHECK(std::abs(w[0].value - 0.215) <= 1e-3);
    CHECK(std::abs(w[1].value - 0.25) <= 1e-9);
    CHECK(r.counterexample->selector == std::vector<std::size_t>{0, 1, 2});
    CHECK(reverify(r));
  }

  TEST_CASE("CI fails A2 with C") {
    const auto r = check_axiom(AxiomId::A2, id("ci"));
    REQUIRE(r.verdict == Verdict::Fail);
    CHECK(std::abs(r.counterexample->witnesses[0].value - 3.555) <= 1e-3);
    CHECK(reverify(r));
  }

  TEST_CASE("CI failures are rediscovered without the corpus") {
    auto cfg = search_only();
    cfg.samples = 10000;
    for (AxiomId a : {AxiomId::A2, AxiomId::A4}) {
      const auto r = check_axiom(a, id("ci"), cfg);
      CHECK(r.verdict == Verdict::Fail);
      CHECK(reverify(r));
    }
  }

  TEST_CASE("Kii passes A1 on 10^4 samples") {
    auto cfg = search_only();
    cfg.samples = 5000;
    const auto r = check_axiom(AxiomId::A1, id("kii"), cfg);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.trials == 10000);
    CHECK_FALSE(r.counterexample);
  }

  TEST_CASE("ii5 fails A5 with the swap pair") {
    const auto r = check_axiom(AxiomId::A5, id("ii5"));
    REQUIRE(r.verdict == Verdict::Fail);
    const auto& w = r.counterexample->witnesses;
    CHECK(std::abs(w[0].value - 0.8) <= 1e-12);
    CHECK(std::abs(w[1].value - 5.0 / 7) <= 1e-12);
    CHECK(reverify(r));
  }

  TEST_CASE("A4 trial counts: exhaustive up to order 6") {
    auto cfg = search_only();
    cfg.max_order = 6;
    const auto r = check_axiom(AxiomId::A4, id("kii"), cfg);
    CHECK(r.verdict == Verdict::Pass);
    std::size_t expected = 0;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const std::size_t n = 4 + s % 3;
      for (std::size_t m = 3; m < n; ++m) expected += binom(n, m);
    }
    CHECK(r.samples == 200);
    CHECK(r.trials == expected);
  }

  TEST_CASE("A4 samples selectors above exhaustive_order") {
    auto cfg = search_only();
    cfg.samples = 4;
    cfg.max_order = 7;
    cfg.exhaustive_order = 6;
    const auto r = check_axiom(AxiomId::A4, id("kii"), cfg);
    // orders 4, 5, 6 exhaustive; 7 gets 200 selectors for each m in 3..6
    CHECK(r.trials == 4 + 15 + 41 + 4 * 200);
  }

  TEST_CASE("A5 covers all permutations where affordable") {
    auto cfg = search_only();
    const auto r = check_axiom(AxiomId::A5, id("kii"), cfg);
    CHECK(r.verdict == Verdict::Pass);
    // 200 samples over orders 3..7, 40 each; 3! = 6, 4! = 24, 5! = 120, then 200.
    CHECK(r.trials == 40 * (6 + 24 + 120 + 200 + 200));
  }

  TEST_CASE("A3 floor table for Kii under the log distance") {
    auto cfg = search_only();
    cfg.distances = {DistanceKind::LogAbs};
    const auto r = check_axiom(AxiomId::A3, id("kii"), cfg);
    CHECK(r.verdict == Verdict::Pass);
    REQUIRE(r.phi_table.size() == 1);
    const auto& rows = r.phi_table[0].rows;
    REQUIRE(rows.size() == cfg.phi_grid.size());
    double previous = 0.0;
    for (const auto& row : rows) {
      const double bound = 1.0 - std::exp(-row.phi);
      CHECK(row.trials > 0);
      CHECK(row.floor >= bound - 1e-12);
      CHECK(row.floor <= bound + 0.02);
      CHECK(row.floor > previous);
      previous = row.floor;
    }
  }

  TEST_CASE("A3 verdicts depend on the distance") {
    auto cfg = search_only();
    cfg.distances = {DistanceKind::LogAbs};
    CHECK(check_axiom(AxiomId::A3, id("ii5"), cfg).verdict == Verdict::Inconclusive);
    cfg.distances = {DistanceKind::AbsDiff};
    CHECK(check_axiom(AxiomId::A3, id("ii5"), cfg).verdict == Verdict::Pass);
    CHECK(check_axiom(AxiomId::A3, id("kii"), cfg).verdict == Verdict::Fail);
    cfg.distances = {DistanceKind::LogAbs, DistanceKind::AbsDiff};
    CHECK(check_axiom(AxiomId::A3, id("ii5"), cfg).verdict == Verdict::Pass);
    CHECK(check_axiom(AxiomId::A3, id("kii"), cfg).verdict == Verdict::Pass);
  }

  TEST_CASE("A3: ii3 fails, CI stays inconclusive") {
    const auto r3 = check_axiom(AxiomId::A3, id("ii3"));
    CHECK(r3.verdict == Verdict::Fail);
    CHECK(reverify(r3));
    const auto rc = check_axiom(AxiomId::A3, id("ci"));
    CHECK(rc.verdict == Verdict::Inconclusive);
    CHECK_FALSE(rc.counterexample);
  }

  TEST_CASE("A3 relative-error convention") {
    auto cfg = search_only();
    cfg.distances = {DistanceKind::LogAbs};
    cfg.samples = 50;
    const auto a = check_axiom(AxiomId::A3, id("kii"), cfg);
    cfg.error_convention = TriadErrorConvention::MiddleOverProduct;
    const auto b = check_axiom(AxiomId::A3, id("kii"), cfg);
    CHECK(b.error_convention == TriadErrorConvention::MiddleOverProduct);
    for (std::size_t i = 0; i < a.phi_table[0].rows.size(); ++i) {
      const auto& ra = a.phi_table[0].rows[i];
      const auto& rb = b.phi_table[0].rows[i];
      CHECK(ra.floor == rb.floor);
      CHECK(ra.relative_error != rb.relative_error);
    }
  }

  TEST_CASE("determinism") {
    for (AxiomId a : kAllAxioms) {
      const auto r1 = check_axiom(a, id("ii4"));
      const auto r2 = check_axiom(a, id("ii4"));
      CHECK(report_to_json(r1).dump() == report_to_json(r2).dump());
    }
    AxiomCheckConfig other;
    other.rng_seed = 2;
    CHECK(check_axiom(AxiomId::A3, id("kii")).phi_table !=
          check_axiom(AxiomId::A3, id("kii"), other).phi_table);
  }

  TEST_CASE("tampered witnesses do not reverify") {
    auto r = check_axiom(AxiomId::A4, id("ii4"));
    REQUIRE(reverify(r));
    auto tampered = r;
    tampered.counterexample->witnesses[1].value += 1e-9;
    CHECK_FALSE(reverify(tampered));
    tampered = r;
    tampered.counterexample->selector = {0, 1, 2};
    CHECK_FALSE(reverify(tampered));
    tampered = r;
    tampered.counterexample.reset();
    CHECK_FALSE(reverify(tampered));
  }
}

TEST_SUITE("suites") {
  TEST_CASE("independence grid matches the theorem") {
    const auto grid = run_independence_suite();
    REQUIRE(grid.size() == 5);
    for (std::size_t j = 0; j < 5; ++j) {
      REQUIRE(grid[j].size() == 5);
      for (std::size_t k = 0; k < 5; ++k) {
        CHECK(grid[j][k].verdict == (j == k ? Verdict::Fail : Verdict::Pass));
        CHECK(reverify(grid[j][k]));
      }
    }
    CHECK(grid[0][0].counterexample->witnesses[0].value == 0.5);
    CHECK(std::abs(grid[1][1].counterexample->witnesses[0].value - 16.0 / 9) <= 1e-12);
    const auto& w4 = grid[3][3].counterexample->witnesses;
    CHECK(std::abs(w4[0].value - 0.5) <= 1e-12);
    CHECK(std::abs(w4[1].value - 11.0 / 12) <= 1e-12);
  }

  TEST_CASE("deviations raise SuiteViolation with the grid") {
    AxiomCheckConfig cfg;
    cfg.distances = {DistanceKind::LogAbs};
    const auto deviations = independence_deviations(independence_grid(cfg));
    REQUIRE(deviations.size() == 1);
    CHECK(deviations[0] == "ii5/A3: expected PASS, got INCONCLUSIVE");
    try {
      run_independence_suite(cfg);
      FAIL("expected SuiteViolation");
    } catch (const SuiteViolation& e) {
      CHECK(e.code() == ErrorCode::SuiteViolation);
      CHECK(e.reports().size() == 25);
    }
  }

  TEST_CASE("Kii passes all five axioms") {
    const auto reports = run_consistency_suite();
    REQUIRE(reports.size() == 5);
    for (const auto& r : reports) CHECK(r.verdict == Verdict::Pass);
  }
}

TEST_SUITE("report json") {
  TEST_CASE("lossless round trip") {
    for (AxiomId a : kAllAxioms) {
      for (const char* ind : {"ci", "kii", "ii3", "ii5"}) {
        const auto r = check_axiom(a, id(ind));
        const auto back = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
        CHECK(back == r);
        CHECK(reverify(back));
      }
    }
  }

  TEST_CASE("fields") {
    const auto j = report_to_json(check_axiom(AxiomId::A4, id("ci")));
    CHECK(j["axiom"] == "A4");
    CHECK(j["indicator"] == "ci");
    CHECK(j["verdict"] == "FAIL");
    CHECK(j["counterexample"]["selector"] == nlohmann::json::array({1, 2, 3}));
    CHECK(j["counterexample"]["witnesses"][0]["matrix"]["n"] == 4);
    CHECK_FALSE(j.contains("phi_table"));
    CHECK(report_to_json(check_axiom(AxiomId::A3, id("kii"))).contains("phi_table"));
  }

  TEST_CASE("rounded output") {
    const auto r = check_axiom(AxiomId::A4, id("ci"));
    const auto j = report_to_json(r, 12);
    const double v = j["counterexample"]["witnesses"][0]["value"];
    CHECK(v != r.counterexample->witnesses[0].value);
    CHECK(std::abs(v - r.counterexample->witnesses[0].value) <= 1e-12);
    const auto back = report_from_json(j);
    CHECK(back.verdict == r.verdict);
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(report_from_json(nlohmann::json::object()), Error);
    auto j = report_to_json(check_axiom(AxiomId::A1, id("kii")));
    j["verdict"] = "MAYBE";
    CHECK_THROWS_AS(report_from_json(j), Error);
  }
}
