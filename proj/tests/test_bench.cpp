#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "smips/bench.hpp"

using namespace smips;

namespace {

ResultRow method_row(const std::string& method, const std::string& id,
                     std::uint64_t seed, double rho0, double obj, double wall,
                     bool converged, const std::string& status) {
  ResultRow r;
  r.instance_id = id;
  r.family = "sslp_like";
  r.seed = seed;
  r.method = method;
  r.rho0 = rho0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (method == "pbgs") {
    r.beta = 1.25;
    r.gamma_factor = 1.0;
  } else {
    r.beta = r.gamma_factor = nan;
  }
  r.objective = obj;
  r.exact_objective = nan;
  r.gap = nan;
  r.wall_ms = wall;
  r.converged = converged;
  r.status = status;
  return r;
}

std::string grid_json() {
  return R"({
    "family": "sslp_like", "m": 2, "n": 3, "scenarios": 3,
    "seeds": [1, 2], "methods": ["pbgs", "ph"],
    "rho0": [1.0], "beta": [1.25], "gamma_factor": [1.0],
    "eps": 0.001, "k_max": 25, "l_max": 10, "time_limit_ms": 60000
  })";
}

bool summary_equal(const Summary& a, const Summary& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.rho0 != y.rho0 || x.beta != y.beta || x.gamma_factor != y.gamma_factor)
      return false;
    if (x.pairs != y.pairs || x.speedup_pairs != y.speedup_pairs) return false;
    if (x.objdiff_mean != y.objdiff_mean || x.objdiff_stdev != y.objdiff_stdev)
      return false;
    if (x.speedup_mean != y.speedup_mean || x.speedup_stdev != y.speedup_stdev)
      return false;
    if (x.ph_conv_fraction != y.ph_conv_fraction) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("grid parsing: round trip of a valid grid") {
  const auto g = parse_grid(grid_json());
  CHECK(g.family == Family::sslp_like);
  CHECK(g.m == 2);
  CHECK(g.n == 3);
  CHECK(g.scenarios == 3);
  CHECK(g.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(g.methods == std::vector<std::string>{"pbgs", "ph"});
  CHECK(g.rho0_list == std::vector<double>{1.0});
  CHECK(g.beta_list == std::vector<double>{1.25});
  CHECK(g.gamma_factor_list == std::vector<double>{1.0});
  CHECK(g.eps == 0.001);
  CHECK(g.k_max == 25);
  CHECK(g.l_max == 10);
  CHECK(g.time_limit_ms == 60000);
  CHECK(g.periods == 1);
  CHECK(g.threads == 1);
}

TEST_CASE("grid parsing: malformed grids rejected") {
  CHECK_THROWS_AS(parse_grid("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("[1,2]"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(R"({"family":"sslp_like"})"), std::invalid_argument);

  auto reject = [](const std::string& from, const std::string& to) {
    std::string text = grid_json();
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    CHECK_THROWS_AS(parse_grid(text), std::invalid_argument);
  };
  reject("\"family\": \"sslp_like\"", "\"family\": \"unknown\"");
  reject("\"methods\": [\"pbgs\", \"ph\"]", "\"methods\": [\"pbgs\", \"simplex\"]");
  reject("\"methods\": [\"pbgs\", \"ph\"]", "\"methods\": []");
  reject("\"seeds\": [1, 2]", "\"seeds\": []");
  reject("\"rho0\": [1.0]", "\"rho0\": [-1.0]");
  reject("\"beta\": [1.25]", "\"beta\": [1.0]");
  reject("\"time_limit_ms\": 60000", "\"time_limit_ms\": 0");
  reject("\"eps\": 0.001", "\"eps\": 0");
  reject("\"k_max\": 25", "\"k_max\": 0");
  reject("\"m\": 2", "\"m\": 0");
  reject("\"eps\": 0.001", "\"epsilon\": 0.001");  // unknown field
}

TEST_CASE("csv: round trip is bit exact") {
  std::vector<ResultRow> rows;
  ResultRow a;
  a.instance_id = "sslp_like_m2_n3_s1_S3";
  a.family = "sslp_like";
  a.seed = 1;
  a.method = "pbgs";
  a.rho0 = 0.1;
  a.beta = 1.25;
  a.gamma_factor = 0.5;
  a.outer_iters = 7;
  a.inner_iters = 23;
  a.wall_ms = 1234.5678901234567;
  a.residual = 1e-17;
  a.objective = -147.03;
  a.exact_objective = -150.0;
  a.gap = (a.objective - a.exact_objective) / std::fabs(a.exact_objective);
  a.converged = true;
  a.nodes = 991;
  a.subproblems = 161;
  a.status = "residual_met";
  rows.push_back(a);

  ResultRow b = method_row("ph", "sslp_like_m2_n3_s2_S3", 2, 2.0,
                           std::numeric_limits<double>::quiet_NaN(), 31.25, false,
                           "error: scenario 1 infeasible");
  rows.push_back(b);

  const std::string text = to_csv(rows);
  const auto parsed = from_csv(text);
  REQUIRE(parsed.size() == 2);
  CHECK(to_csv(parsed) == text);
  CHECK(parsed[0].wall_ms == a.wall_ms);
  CHECK(parsed[0].residual == a.residual);
  CHECK(parsed[0].gap == a.gap);
  CHECK(std::isnan(parsed[1].objective));
  CHECK(std::isnan(parsed[1].beta));
}

TEST_CASE("csv: header and field-count validation") {
  CHECK_THROWS_AS(from_csv("foo,bar\n"), std::invalid_argument);
  CHECK_THROWS_AS(from_csv(csv_header() + "\na,b,c\n"), std::invalid_argument);
  CHECK(from_csv(csv_header() + "\n").empty());
}

TEST_CASE("summarize: hand-computed statistics on a six-row fixture") {
  // Three (instance, seed) pairs with one pbgs parameter combination.
  // Objective differences (11-10)/10, (10-10)/10, (9-10)/10 = {0.1, 0, -0.1}:
  // mean 0, sample stdev sqrt(0.02/2) = 0.1. Walls all doubled: speed-up 2.
  std::vector<ResultRow> rows;
  rows.push_back(method_row("pbgs", "i1", 1, 1.0, 11.0, 100.0, true, "residual_met"));
  rows.push_back(method_row("pbgs", "i2", 2, 1.0, 10.0, 200.0, true, "residual_met"));
  rows.push_back(method_row("pbgs", "i3", 3, 1.0, 9.0, 50.0, true, "residual_met"));
  rows.push_back(method_row("ph", "i1", 1, 1.0, 10.0, 200.0, true, "residual_met"));
  rows.push_back(method_row("ph", "i2", 2, 1.0, 10.0, 400.0, true, "residual_met"));
  rows.push_back(method_row("ph", "i3", 3, 1.0, 10.0, 100.0, true, "residual_met"));

  const auto summary = summarize(rows);
  REQUIRE(summary.rows.size() == 1);
  const auto& s = summary.rows[0];
  CHECK(s.rho0 == 1.0);
  CHECK(s.beta == 1.25);
  CHECK(s.gamma_factor == 1.0);
  CHECK(s.pairs == 3);
  CHECK(s.speedup_pairs == 3);
  CHECK(s.objdiff_mean == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.objdiff_stdev == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.speedup_mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.speedup_stdev == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.ph_conv_fraction == 1.0);
}

TEST_CASE("summarize: identical objective columns give zero mean and stdev") {
  std::vector<ResultRow> rows;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "i" + std::to_string(i);
    rows.push_back(method_row("pbgs", id, i, 1.0, 7.5, 10.0 + i, true, "residual_met"));
    rows.push_back(method_row("ph", id, i, 1.0, 7.5, 20.0 + i, true, "residual_met"));
  }
  const auto summary = summarize(rows);
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.rows[0].objdiff_mean == 0.0);
  CHECK(summary.rows[0].objdiff_stdev == 0.0);
}

TEST_CASE("summarize: timed-out ph partner dropped, convergence still counted") {
  // Five pairs; the third ph run hit the time limit. Convergence fraction
  // counts it (4/5 = 0.8) but the pair leaves the speed-up statistics.
  std::vector<ResultRow> rows;
  for (int i = 0; i < 5; ++i) {
    const std::string id = "i" + std::to_string(i);
    rows.push_back(method_row("pbgs", id, i, 1.0, 10.0, 100.0, true, "residual_met"));
    const bool timeout = i == 2;
    rows.push_back(method_row("ph", id, i, 1.0, timeout ? 30.0 : 10.0,
                              timeout ? 5000.0 : 300.0, !timeout,
                              timeout ? "time_limit" : "residual_met"));
  }
  const auto summary = summarize(rows);
  REQUIRE(summary.rows.size() == 1);
  const auto& s = summary.rows[0];
  CHECK(s.pairs == 5);
  CHECK(s.speedup_pairs == 4);
  CHECK(s.ph_conv_fraction == doctest::Approx(0.8));
  CHECK(s.speedup_mean == doctest::Approx(3.0));
  CHECK(s.speedup_stdev == doctest::Approx(0.0));
  CHECK(s.objdiff_mean == doctest::Approx(0.0));
}

TEST_CASE("summarize: rows group by parameter combination") {
  std::vector<ResultRow> rows;
  for (double rho0 : {1.0, 2.0}) {
    rows.push_back(method_row("pbgs", "i1", 1, rho0, 10.0 + rho0, 100.0, true,
                              "residual_met"));
    rows.push_back(method_row("ph", "i1", 1, rho0, 10.0, 200.0 * rho0, true,
                              "residual_met"));
  }
  const auto summary = summarize(rows);
  REQUIRE(summary.rows.size() == 2);
  CHECK(summary.rows[0].rho0 == 1.0);
  CHECK(summary.rows[1].rho0 == 2.0);
  CHECK(summary.rows[0].speedup_mean == doctest::Approx(2.0));
  CHECK(summary.rows[1].speedup_mean == doctest::Approx(4.0));
}

TEST_CASE("summarize: missing ph partner reported") {
  std::vector<ResultRow> rows;
  rows.push_back(method_row("pbgs", "i1", 1, 1.0, 10.0, 100.0, true, "residual_met"));
  rows.push_back(method_row("ph", "i2", 2, 1.0, 10.0, 200.0, true, "residual_met"));
  CHECK_THROWS_AS(summarize(rows), std::invalid_argument);
}

TEST_CASE("summarize: permutation invariance") {
  std::vector<ResultRow> rows;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 6; ++i) {
    const std::string id = "i" + std::to_string(i);
    const double rho0 = i % 2 ? 1.0 : 4.0;
    rows.push_back(method_row("pbgs", id, i, rho0, 10.0 + i, 50.0 + i, true,
                              "residual_met"));
    rows.push_back(method_row("ph", id, i, rho0, 11.0, 150.0 + i, i % 3 != 0,
                              i % 3 ? "residual_met" : "k_max"));
  }
  const auto reference = summarize(rows);
  for (int trial = 0; trial < 10; ++trial) {
    for (size_t i = rows.size(); i > 1; --i)
      std::swap(rows[i - 1], rows[rng() % i]);
    CHECK(summary_equal(summarize(rows), reference));
  }
}

TEST_CASE("run_experiment: exact-only grid gives gap-zero rows") {
  auto g = parse_grid(grid_json());
  g.methods = {"exact"};
  g.seeds = {1};
  const auto rows = run_experiment(g);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].method == "exact");
  CHECK(rows[0].gap == 0.0);
  CHECK(rows[0].converged);
  CHECK(rows[0].status == "optimal");
  CHECK(rows[0].family == "sslp_like");
}

TEST_CASE("run_experiment: two seeds, both methods, csv round trip") {
  const auto g = parse_grid(grid_json());
  std::ostringstream csv;
  const auto rows = run_experiment(g, nullptr, &csv);
  REQUIRE(rows.size() == 6);  // per seed: exact + pbgs + ph
  int exact = 0, pbgs = 0, ph = 0;
  for (const auto& r : rows) {
    if (r.method == "exact") ++exact;
    if (r.method == "pbgs") ++pbgs;
    if (r.method == "ph") ++ph;
  }
  CHECK(exact == 2);
  CHECK(pbgs == 2);
  CHECK(ph == 2);
  const auto parsed = from_csv(csv.str());
  REQUIRE(parsed.size() == rows.size());
  CHECK(to_csv(parsed) == to_csv(rows));
  CHECK(csv.str() == to_csv(rows));
}

TEST_CASE("run_experiment: heuristic objectives never beat the exact optimum") {
  auto g = parse_grid(grid_json());
  g.seeds = {1, 2, 3, 4, 5};
  const auto rows = run_experiment(g);
  int evaluated = 0;
  for (const auto& r : rows) {
    if (r.method == "exact" || std::isnan(r.objective)) continue;
    CHECK(r.objective >= r.exact_objective - 1e-6);
    CHECK(r.gap >= -1e-9);
    ++evaluated;
  }
  CHECK(evaluated > 0);
  const auto summary = summarize(rows);
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.rows[0].pairs == 5);
  CHECK(!summary.render().empty());
}

TEST_CASE("run_experiment: determinism across repeated runs") {
  auto g = parse_grid(grid_json());
  g.seeds = {3};
  const auto a = run_experiment(g);
  const auto b = run_experiment(g);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].instance_id == b[i].instance_id);
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].outer_iters == b[i].outer_iters);
    CHECK(a[i].inner_iters == b[i].inner_iters);
    CHECK(a[i].nodes == b[i].nodes);
    CHECK(a[i].subproblems == b[i].subproblems);
    const bool obj_same = (std::isnan(a[i].objective) && std::isnan(b[i].objective)) ||
                          a[i].objective == b[i].objective;
    CHECK(obj_same);
    CHECK(a[i].status == b[i].status);
  }
}

TEST_CASE("run_experiment: invalid grid rejected up front") {
  auto g = parse_grid(grid_json());
  g.seeds.clear();
  CHECK_THROWS_AS(run_experiment(g), std::invalid_argument);
}
