#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "doctest.h"
#include "httplib.h"
#include "pcii/cli.hpp"
#include "pcii/harness.hpp"
#include "pcii/matrix_io.hpp"

using namespace pcii;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("pcii-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string write(const std::string& name, const std::string& body) const {
    std::ofstream(path / name) << body;
    return (path / name).string();
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const char* kTriadCsv = "1,2,1\n1/2,1,3\n1,1/3,1\n";

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  int port = -1;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), len) == 0 &&
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
    port = ntohs(addr.sin_port);
  }
  ::close(fd);
  return port;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("compute text and json") {
    TempDir dir;
    const auto m = dir.write("a.csv", kTriadCsv);

    const auto text = run({"compute", "--indicator", "kii", "--matrix", m});
    CHECK(text.code == 0);
    CHECK(text.out.find("value: 0.833333") != std::string::npos);
    CHECK(text.out.find("worst triad: (1, 2, 3)") != std::string::npos);

    const auto js = run({"compute", "--indicator", "ci", "--matrix", m, "--json"});
    REQUIRE(js.code == 0);
    const auto j = json::parse(js.out);
    CHECK(j["indicator"] == "ci");
    CHECK(j.contains("lambda_max"));
    CHECK(j["value"].get<double>() == doctest::Approx((j["lambda_max"].get<double>() - 3) / 2).epsilon(1e-11));
  }

  TEST_CASE("worst triad and repair") {
    TempDir dir;
    const auto m = dir.write("a.csv", kTriadCsv);
    const auto r = run({"worst-triad", "--indicator", "kii", "--matrix", m, "--json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["triad"] == json::array({1, 2, 3}));
    CHECK(j["values"] == json::array({2.0, 1.0, 3.0}));
    CHECK(j["repair"]["cell"] == json::array({1, 3}));
    CHECK(j["repair"]["proposed"].get<double>() == 6.0);
    CHECK(j["alternatives"].size() == 2);

    const auto ci = run({"worst-triad", "--indicator", "ci", "--matrix", m});
    CHECK(ci.code == 0);
    CHECK(ci.out.find("repair: a13 = 1 -> 6") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    TempDir dir;
    const auto good = dir.write("a.csv", kTriadCsv);
    const auto bad = dir.write("bad.csv", "1,2,1\n0.4,1,3\n1,1/3,1\n");

    SUBCASE("usage errors exit 2") {
      CHECK(run({}).code == 2);
      CHECK(run({"frobnicate"}).code == 2);
      CHECK(run({"compute", "--matrix", good}).code == 2);
      CHECK(run({"compute", "--indicator", "nope", "--matrix", good}).code == 2);
      CHECK(run({"check-axioms", "--indicator", "kii", "--axiom", "A9"}).code == 2);
      CHECK(run({"check-axioms", "--indicator", "kii", "--distance", "euclid"}).code == 2);
      CHECK(run({"gen", "--n", "2", "--spread", "1", "--out", dir / "x.csv"}).code == 2);
    }
    SUBCASE("help exits 0") { CHECK(run({"--help"}).code == 0); }
    SUBCASE("matrix validation exits 1 with coordinates") {
      const auto r = run({"compute", "--indicator", "kii", "--matrix", bad});
      CHECK(r.code == 1);
      CHECK(r.err.find("ReciprocityViolation at (1, 2)") != std::string::npos);
    }
    SUBCASE("non-unit diagonal reports the row") {
      const auto m = dir.write("d.csv", "2,1,1\n1,1,1\n1,1,1\n");
      const auto r = run({"compute", "--indicator", "kii", "--matrix", m});
      CHECK(r.code == 1);
      CHECK(r.err.find("NonUnitDiagonal at row 1") != std::string::npos);
    }
    SUBCASE("missing file exits 1") {
      CHECK(run({"compute", "--indicator", "kii", "--matrix", dir / "none.csv"}).code == 1);
    }
  }

  TEST_CASE("check-axioms json round trips") {
    const auto r = run({"check-axioms", "--indicator", "ii4", "--axiom", "A4", "--json"});
    REQUIRE(r.code == 0);
    const auto report = report_from_json(json::parse(r.out));
    CHECK(report.axiom == AxiomId::A4);
    CHECK(report.verdict == Verdict::Fail);
    REQUIRE(report.counterexample);
    const auto& w = report.counterexample->witnesses;
    REQUIRE(w.size() == 2);
    CHECK(w[1].value > w[0].value);
    for (const auto& wi : w) {
      CHECK(wi.value == doctest::Approx(evaluate(report.indicator, wi.matrix).value).epsilon(1e-11));
    }

    const auto all = run({"check-axioms", "--indicator", "kii", "--samples", "20", "--json"});
    REQUIRE(all.code == 0);
    const auto arr = json::parse(all.out);
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 5);
    for (const auto& j : arr) CHECK(report_from_json(j).verdict == Verdict::Pass);
  }

  TEST_CASE("independence grid") {
    const auto r = run({"independence"});
    CHECK(r.code == 0);
    CHECK(r.out.find("each ii_j fails exactly A_j") != std::string::npos);
    const auto js = run({"independence", "--json"});
    CHECK(js.code == 0);
    const auto j = json::parse(js.out);
    CHECK(j["grid"].size() == 5);
    CHECK(j["deviations"].empty());
  }

  TEST_CASE("consistency suite") {
    const auto r = run({"consistency-suite", "--samples", "50"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
  }

  TEST_CASE("seed from environment and determinism") {
    TempDir dir;
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const auto c = dir / "c.csv";
    REQUIRE(run({"gen", "--n", "5", "--spread", "2", "--seed", "42", "--out", a}).code == 0);
    ::setenv("PCII_SEED", "42", 1);
    REQUIRE(run({"gen", "--n", "5", "--spread", "2", "--out", b}).code == 0);
    REQUIRE(run({"gen", "--n", "5", "--spread", "2", "--seed", "7", "--out", c}).code == 0);
    const auto env_report = run({"check-axioms", "--indicator", "kii", "--axiom", "A3", "--json"});
    ::unsetenv("PCII_SEED");
    const auto flag_report =
        run({"check-axioms", "--indicator", "kii", "--axiom", "A3", "--seed", "42", "--json"});

    auto slurp = [](const std::string& p) {
      std::ifstream in(p);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    CHECK(env_report.out == flag_report.out);
    CHECK(run({"check-axioms", "--indicator", "ii3", "--axiom", "A3"}).out ==
          run({"check-axioms", "--indicator", "ii3", "--axiom", "A3"}).out);
  }

  TEST_CASE("gen output") {
    TempDir dir;
    REQUIRE(run({"gen", "--n", "6", "--spread", "3", "--consistent", "--seed", "5", "--out", dir / "g.json"})
                .code == 0);
    const auto a = load_matrix(dir / "g.json");
    CHECK(a.order() == 6);
    CHECK(is_consistent(a));
  }

  TEST_CASE("reciprocalize") {
    TempDir dir;
    const auto in = dir.write("bad.csv", "1,2,1\n0.4,1,3\n1,1/3,1\n");
    REQUIRE(run({"reciprocalize", "--matrix", in, "--out", dir / "r.csv"}).code == 0);
    const auto a = load_matrix(dir / "r.csv");
    CHECK(a(0, 1) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(a(1, 0) * a(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("serve until SIGTERM") {
    TempDir dir;
    const int port = free_port();
    REQUIRE(port > 0);
    Run result{-1, {}, {}};
    std::thread server([&] {
      result = run({"serve", "--port", std::to_string(port), "--state", dir.path.string()});
    });

    httplib::Client cli("127.0.0.1", port);
    httplib::Result res;
    for (int i = 0; i < 250 && !res; ++i) {
      res = cli.Post("/sessions", R"({"entities": ["a", "b", "c"]})", "application/json");
      if (!res) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    REQUIRE(res);
    CHECK(res->status == 201);
    cli.stop();

    std::raise(SIGTERM);
    server.join();
    CHECK(result.code == 0);
    CHECK(result.out.find("listening on http://127.0.0.1:" + std::to_string(port)) != std::string::npos);
    CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{}) == 1);
  }
}
