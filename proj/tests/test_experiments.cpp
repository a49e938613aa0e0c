#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fairdiv/decentralized.hpp"
#include "fairdiv/experiments.hpp"
#include "fairdiv/generators.hpp"
#include "fairdiv/welfare.hpp"
#include "oracles.hpp"

using namespace fairdiv;

namespace {

SweepConfig small_exact(std::uint64_t seed) {
  SweepConfig cfg;
  cfg.n = 3;
  cfg.m = 5;
  cfg.grid = {1, 10, 1000};
  cfg.trials = 6;
  cfg.opt_engine.engine = Engine::Oracle;
  cfg.cen_engine.engine = Engine::Oracle;
  cfg.seed = seed;
  cfg.threads = 1;
  return cfg;
}

SweepRecord row(Value e_max, Mechanism mech, int trial, double ratio) {
  return {10, 20, e_max, mech, trial, 0, ratio, false};
}

}  // namespace

TEST_CASE("aggregate statistics") {
  const auto one = aggregate({row(5, Mechanism::DEC, 0, 0.7)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].ratio.mean == doctest::Approx(0.7));
  CHECK(one[0].ratio.stderr_ == 0.0);
  CHECK(one[0].low_count);

  std::vector<SweepRecord> flat;
  for (int t = 0; t < 4; ++t) flat.push_back(row(5, Mechanism::CEN, t, 0.25));
  const auto c = aggregate(flat);
  CHECK(c[0].ratio.stderr_ == 0.0);
  CHECK_FALSE(c[0].low_count);

  // Hand computation: mean 0.6, sample variance 0.1, stderr sqrt(0.1 / 5).
  std::vector<SweepRecord> five;
  for (int t = 0; t < 5; ++t) five.push_back(row(100, Mechanism::CEN3R, t, 0.2 * (t + 1)));
  five.push_back(row(100, Mechanism::DEC, 0, 0.9));
  const auto agg = aggregate(five);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].mechanism == Mechanism::DEC);
  CHECK(agg[1].ratio.mean == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(agg[1].ratio.stderr_ == doctest::Approx(0.1414213562373095).epsilon(1e-12));
  CHECK(agg[1].ratio.count == 5);

  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("CSV documents round-trip") {
  std::vector<SweepRecord> raw{row(1, Mechanism::CEN, 0, 1.0 / 3), row(1, Mechanism::RAND3R, 1, 0.125)};
  raw[1].exact = true;
  raw[1].seed = 18446744073709551615ull;
  const std::string text = write_raw_csv(raw);
  CHECK(text.rfind("# fairdiv-raw v1\nn,m,e_max,mechanism,trial,seed,ratio,exact\n", 0) == 0);
  const auto back = parse_raw_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].ratio == raw[0].ratio);
  CHECK(back[1].seed == raw[1].seed);
  CHECK(back[1].exact);
  CHECK(back[1].mechanism == Mechanism::RAND3R);

  const auto agg = aggregate(raw);
  const std::string atext = write_agg_csv(agg);
  CHECK(atext.rfind("# fairdiv-agg v1\nn,m,e_max,mechanism,mean,stderr,count,low_count\n", 0) == 0);
  const auto aback = parse_agg_csv(atext);
  REQUIRE(aback.size() == agg.size());
  CHECK(aback[0].ratio.mean == agg[0].ratio.mean);
  CHECK(aback[0].low_count);
  CHECK_THROWS(parse_raw_csv("n,m\n1,2\n"));
  CHECK_THROWS(parse_agg_csv(atext + "1,2,3\n"));
}

TEST_CASE("seed derivation") {
  CHECK(instance_seed(1, 10, 3) == instance_seed(1, 10, 3));
  CHECK(instance_seed(1, 10, 3) != instance_seed(1, 10, 4));
  CHECK(instance_seed(1, 10, 3) != instance_seed(2, 10, 3));
  CHECK(mechanism_seed(1, 10, 3, Mechanism::CEN3R) != mechanism_seed(1, 10, 3, Mechanism::RAND3R));
}

TEST_CASE("exact sweep cells") {
  const SweepConfig cfg = small_exact(5);
  const auto raw = run_sweep(cfg);
  CHECK(raw.size() == 3u * 6u * 4u);
  for (const auto& r : raw) {
    CHECK(r.exact);
    CHECK(r.ratio >= -1e-12);
    CHECK(r.ratio <= 1 + 1e-12);
  }

  for (int t = 0; t < cfg.trials; ++t) {
    for (Value e_max : cfg.grid) {
      const Instance I = generate_random({cfg.n, cfg.m, e_max, cfg.total_valuation, instance_seed(cfg.seed, e_max, t)});
      const auto cell = run_cell(cfg, e_max, t);
      REQUIRE(cell.size() == 4);
      REQUIRE(cell[1].mechanism == Mechanism::DEC);
      const double best = oracle::best_nash(I).score, base = oracle::baseline(I);

      // CEN reaches ratio 1 exactly when the endowment-blind optimum is also Nash optimal.
      const auto cen = oracle::owners(solve_oracle(I, Objective::GoodsOnly).allocation);
      CHECK((std::abs(cell[0].ratio - 1) < 1e-9) == (oracle::nash(I, cen) >= best - 1e-9));
      CHECK(cell[0].ratio == doctest::Approx((oracle::nash(I, cen) - base) / (best - base)).epsilon(1e-12));

      if (e_max != 1) continue;
      // With equal endowments DEC matches a utilitarian optimum's ratio.
      double top = -1;
      oracle::for_each_allocation(3, 5, [&](const std::vector<int>& o) { top = std::max(top, oracle::utilitarian(I, o)); });
      bool matched = false;
      oracle::for_each_allocation(3, 5, [&](const std::vector<int>& o) {
        if (oracle::utilitarian(I, o) < top - 1e-9) return;
        matched = matched || std::abs((oracle::nash(I, o) - base) / (best - base) - cell[1].ratio) < 1e-9;
      });
      CHECK(matched);
    }
  }
}

TEST_CASE("sweep output is reproducible and independent of thread count") {
  SweepConfig cfg = small_exact(9);
  cfg.opt_engine.engine = Engine::LocalSearch;
  cfg.cen_engine.engine = Engine::LocalSearch;
  cfg.opt_engine.options.restarts = 3;
  cfg.cen_engine.options.restarts = 3;
  const std::string a = write_raw_csv(run_sweep(cfg));
  cfg.threads = 3;
  CHECK(write_raw_csv(run_sweep(cfg)) == a);
  CHECK(write_raw_csv(run_sweep(cfg)) == a);

  const auto dir = std::filesystem::temp_directory_path() / "fairdiv_sweep_test";
  std::filesystem::remove_all(dir);
  run_sweep_to(cfg, dir);
  CHECK(read_text(dir / "raw.csv") == a);
  CHECK(parse_agg_csv(read_text(dir / "agg.csv")).size() == 12u);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep configuration documents") {
  const SweepConfig cfg = parse_sweep_config(
      R"({"n": 4, "m": 6, "grid": [1, 50], "trials": 3, "mechanisms": ["DEC", "CEN+3R"],
          "opt_engine": {"engine": "bnb", "timeout_ms": 500}, "cen_engine": {"engine": "ls", "restarts": 7},
          "seed": 99})");
  CHECK(cfg.n == 4);
  CHECK(cfg.grid == std::vector<Value>{1, 50});
  CHECK(cfg.mechanisms == std::vector<Mechanism>{Mechanism::DEC, Mechanism::CEN3R});
  CHECK(cfg.opt_engine.engine == Engine::BranchBound);
  CHECK(cfg.opt_engine.options.timeout.count() == 500);
  CHECK(cfg.cen_engine.options.restarts == 7);
  CHECK(cfg.seed == 99u);
  CHECK(parse_sweep_config(to_json(cfg).dump()).grid == cfg.grid);

  const SweepConfig defaults = parse_sweep_config("{}");
  CHECK(defaults.trials == 100);
  CHECK(defaults.grid.size() == 10);
  CHECK(defaults.mechanisms.size() == 4);

  CHECK_THROWS_AS(parse_sweep_config(R"({"trials": 0})"), SweepConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"grid": []})"), SweepConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"mechanisms": []})"), SweepConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"n": "ten"})"), SweepConfigError);
  CHECK_THROWS(parse_sweep_config(R"({"mechanisms": ["OPT"]})"));
}
