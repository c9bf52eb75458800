#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "tracelab/harness.hpp"

using namespace tracelab;

namespace {
ExperimentConfig small_gap() {
  ExperimentConfig cfg;
  cfg.cls.kind = ClassKind::GapClass;
  cfg.cls.n = 4096;
  cfg.cls.epsilon = 0.25;
  cfg.cls.c_prime = 2;
  cfg.cls.q = 0.5;
  cfg.algo = Algo::Gap;
  cfg.q = 0.5;
  cfg.trials = 3;
  cfg.trace_override = 20;
  cfg.master_seed = 42;
  cfg.timing = false;
  return cfg;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}
}  // namespace

TEST_CASE("algo names round trip") {
  for (Algo a : {Algo::LongRuns, Algo::LongRunsRobust, Algo::OneRuns, Algo::Gap, Algo::GapRobust, Algo::Majority}) {
    CHECK(parse_algo(to_string(a)) == a);
  }
  CHECK_FALSE(parse_algo("nope").has_value());
}

TEST_CASE("config validation") {
  auto cfg = small_gap();
  CHECK_NOTHROW(cfg.validate());
  cfg.q = 0.99;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.allow_unchecked_q = true;
  CHECK_NOTHROW(cfg.validate());
  cfg = small_gap();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("noiseless gap trials succeed") {
  auto cfg = small_gap();
  cfg.cls.long_zero_fraction = 1.0;
  cfg.q = 0.0;
  cfg.allow_unchecked_q = true;
  cfg.trace_override = 1;
  for (std::size_t t = 0; t < 5; ++t) {
    const auto r = run_trial(cfg, 0, t);
    CHECK(r.status == "OK");
    CHECK(r.edit_distance <= cfg.cls.epsilon * static_cast<double>(cfg.cls.n));
    CHECK(r.success);
  }
}

TEST_CASE("derived parameters") {
  auto cfg = small_gap();
  cfg.trace_override.reset();
  cfg.cls.n = 16384;
  cfg.cls.c_prime = 200;
  const auto d = derive_params(cfg);
  CHECK(d.T == 1792);
  REQUIRE(d.gap.has_value());
  CHECK(d.gap->L == 2800);
  cfg.algo = Algo::Majority;
  CHECK(derive_params(cfg).T == 1);
}

TEST_CASE("trials are deterministic") {
  const auto cfg = small_gap();
  const auto a = run_trial(cfg, 3, 1);
  const auto b = run_trial(cfg, 3, 1);
  CHECK(a.seed == b.seed);
  CHECK(a.edit_distance == b.edit_distance);
  CHECK(a.status == b.status);
  CHECK(run_trial(cfg, 3, 2).seed != a.seed);
}

TEST_CASE("a module error becomes an ERROR row") {
  auto cfg = small_gap();
  cfg.cls.kind = ClassKind::AllLongRuns;
  cfg.cls.n = 3;  // too short for a single run
  cfg.algo = Algo::LongRuns;
  const auto r = run_trial(cfg, 0, 0);
  CHECK(r.status == "ERROR");
  CHECK_FALSE(r.success);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("sweep output") {
  SweepGrid g;
  g.base = small_gap();
  g.n = {2048, 4096};
  g.epsilon = {0.25};
  g.T = {std::nullopt, std::size_t{10}};
  g.q = {0.5};
  g.algo = {Algo::Gap, Algo::GapRobust};
  CHECK(g.cells().size() == 8);
  CHECK(g.cells()[1].algo == Algo::GapRobust);
  const auto r1 = run_sweep(g, 1);
  const auto r3 = run_sweep(g, 3);
  CHECK(r1.rows.size() == 8 * 3);
  const auto c1 = csv_of(r1);
  CHECK(c1 == csv_of(r3));
  CHECK(c1.substr(0, kCsvHeader.size()) == kCsvHeader);

  std::istringstream is(c1);
  const auto back = read_csv(is);
  CHECK_FALSE(back.class_known);
  CHECK(csv_of(back) == c1);

  const auto s = summarize(r1);
  REQUIRE(s.cells.size() == 8);
  for (const auto& c : s.cells) {
    CHECK(c.trials == 3);
    CHECK(c.rate == doctest::Approx(static_cast<double>(c.successes) / 3.0));
  }
  const auto js = summary_json(r1, s);
  CHECK(js.find("\"cells\"") != std::string::npos);
}

TEST_CASE("read_csv rejects bad input") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_csv(bad_header), std::runtime_error);
  std::istringstream bad_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad_row), std::runtime_error);
}

TEST_CASE("sweep config parsing") {
  const auto f = parse_sweep_config(R"({
    "class": {"kind": "GAP_CLASS", "c_prime": "100/p"},
    "algo": ["gap", "gap-robust"],
    "n": 16384, "epsilon": [0.25, 0.3], "q": 0.5, "T": ["formula", 100],
    "trials": 7, "seed": 9, "timing": false, "workers": 2,
    "csv": "out.csv", "summary": "out.json"
  })");
  CHECK(f.grid.base.cls.kind == ClassKind::GapClass);
  CHECK(f.grid.base.cls.c_prime == doctest::Approx(200));
  CHECK(f.grid.algo.size() == 2);
  CHECK(f.grid.epsilon.size() == 2);
  REQUIRE(f.grid.T.size() == 2);
  CHECK_FALSE(f.grid.T[0].has_value());
  CHECK(f.grid.T[1] == std::optional<std::size_t>(100));
  CHECK(f.grid.base.trials == 7);
  CHECK(f.grid.base.master_seed == 9);
  CHECK_FALSE(f.grid.base.timing);
  CHECK(f.workers == 2);
  CHECK(f.csv_path == "out.csv");
  CHECK_THROWS_AS(parse_sweep_config("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sweep_config(R"({"class": {"kind": "NOPE"}})"), std::invalid_argument);
}

TEST_CASE("seed override from the environment") {
  ::unsetenv("TRACELAB_SEED");
  CHECK(resolve_master_seed(5) == 5);
  ::setenv("TRACELAB_SEED", "123", 1);
  CHECK(resolve_master_seed(5) == 123);
  ::unsetenv("TRACELAB_SEED");
}
