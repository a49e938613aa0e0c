// Acceptance checks: one PASS/FAIL line per criterion. The first argument is
// the path of the fairdiv command-line tool (used by the determinism check),
// the optional second one a directory for sweep output.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "fairdiv/decentralized.hpp"
#include "fairdiv/experiments.hpp"
#include "fairdiv/fairness.hpp"
#include "fairdiv/generators.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/solver.hpp"
#include "fairdiv/welfare.hpp"

using namespace fairdiv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string cli_path;
fs::path work_dir;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Value pick(std::initializer_list<Value> xs, std::uint64_t s) { return xs.begin()[s % xs.size()]; }

bool same_score(const Score& a, const Score& b) {
  return a.count == b.count && std::abs(a.sum_log - b.sum_log) <= 1e-9;
}

bool everyone_served(const Allocation& a) {
  for (int s : a.bundle_sizes())
    if (s == 0) return false;
  return true;
}

Outcome z_table() {
  const double xs[] = {1.0, 0.8, 0.6, 0.4, 0.2}, want[] = {1.92, 1.65, 1.43, 1.25, 1.11};
  Outcome o{true, ""};
  for (int k = 0; k < 5; ++k) {
    const double f = approx_factor(xs[k]);
    o.pass = o.pass && std::abs(f - want[k]) <= 0.005;
    o.detail += fmt("f(%.1f)=%.4f ", xs[k], f);
  }
  return o;
}

Outcome oracle_equivalence() {
  int mismatches = 0, runs = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const int n = 1 + int(s % 3), m = 1 + int((s / 3) % 8);
    const Value e_max = pick({1, 10, 1000}, s);
    const Instance I = generate_random({n, m, e_max, 500, 7000 + s});
    for (Objective obj : {Objective::WithEndowments, Objective::GoodsOnly}) {
      ++runs;
      const SolveResult a = solve_oracle(I, obj), b = solve_branch_bound(I, obj);
      if (!b.exact || !same_score(a.score, b.score)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%d solves, %d mismatches", runs, mismatches)};
}

Outcome examples() {
  const Instance e1 = generate_example1(3, parse_rational("0.01"));
  const auto dec1 = decentralized_solution(e1);
  const auto cen1 = solve_oracle(e1, Objective::GoodsOnly).allocation;
  const auto opt1 = solve_oracle(e1, Objective::WithEndowments).allocation;
  const bool ok1 = dec1 == Allocation::all_to(0, 3, 3) && cen1.bundle_sizes() == std::vector<int>{1, 1, 1} &&
                   opt1.bundle_sizes() == std::vector<int>{1, 1, 1};

  const Instance e2 = generate_example2(8, parse_rational("0.1"));
  const auto dec2 = decentralized_solution(e2);
  const auto cen2 = solve_oracle(e2, Objective::GoodsOnly).allocation;
  const auto opt2 = solve_oracle(e2, Objective::WithEndowments).allocation;
  const bool ok2 = cen2 == Allocation({0, 1}, 2) && dec2 == Allocation({1, 1}, 2) && opt2 == Allocation({1, 1}, 2);
  return {ok1 && ok2, fmt("example1 %s, example2 %s", ok1 ? "ok" : "wrong", ok2 ? "ok" : "wrong")};
}

Outcome decentralized_bound() {
  int violations = 0, checked = 0;
  double worst = 1e300;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const int n = 1 + int(s % 3), m = 1 + int((s / 3) % 8);
    const Value e_max = pick({1, 5, 50, 500, 5000}, s);
    const Instance I = generate_random({n, m, e_max, 500, 11000 + s});
    const auto r = check_decentralized_bound(I, decentralized_solution(I), solve_oracle(I, Objective::WithEndowments).allocation);
    if (!r.precondition) continue;
    ++checked;
    worst = std::min(worst, r.lhs - r.rhs);
    if (!r.conclusion) ++violations;
  }
  return {checked == 200 && violations == 0,
          fmt("%d instances, %d violations, min z*NW(dec)-NW(opt)=%.4g", checked, violations, worst)};
}

Outcome chain_family() {
  Outcome o{true, ""};
  for (const char* xs : {"0.25", "0.5", "1"}) {
    const Rational x = parse_rational(xs);
    const int n = int(std::floor(chain_family_threshold(x))) + 1;
    const Instance I = generate_chain_family(n, x);
    const SolveResult cen = solve_exact(I, Objective::GoodsOnly), opt = solve_exact(I, Objective::WithEndowments);
    const double lhs = z_of(I) * nash_welfare(I, cen.allocation), rhs = nash_welfare(I, opt.allocation);
    const bool ok = cen.exact && opt.exact && lhs < rhs;
    o.pass = o.pass && ok;
    o.detail += fmt("x=%s n=%d: %.5f < %.5f %s; ", xs, n, lhs, rhs, ok ? "ok" : "FAILED");
  }
  return o;
}

Outcome centralized_bound() {
  int accepted = 0, tried = 0, violations = 0;
  for (std::uint64_t s = 0; accepted < 200 && tried < 20000; ++s) {
    ++tried;
    const int n = 1 + int(s % 3), m = n + int((s / 3) % (9 - n));
    const Value e_max = pick({1, 10, 100, 1000}, s);
    const Instance I = generate_random({n, m, e_max, 30, 23000 + s});
    const auto cen = solve_oracle(I, Objective::GoodsOnly).allocation;
    const auto opt = solve_oracle(I, Objective::WithEndowments).allocation;
    const auto r = check_centralized_bound(I, cen, opt);
    if (!r.precondition) continue;
    ++accepted;
    if (!r.conclusion) ++violations;
  }
  return {accepted == 200 && violations == 0,
          fmt("%d qualifying instances (of %d drawn), %d violations", accepted, tried, violations)};
}

Outcome breakdown() {
  const Instance I = generate_breakdown_instance(2, 2, 1);
  const BreakdownReport r = breakdown_check(I);
  const bool ok = r.precondition && r.condition && r.gap_confirmed.value_or(false);
  return {ok, fmt("e=(%lld,%lld), NW(cen)=%.4f NW(opt)=%.4f", (long long)I.endowment(0), (long long)I.endowment(1),
                  r.nw_central.value_or(NAN), r.nw_optimal.value_or(NAN))};
}

Outcome utility_bounds() {
  long bundles = 0, below = 0, above = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Instance I = generate_random({3, 6, Value(1 + s * 7), 60, 31000 + s});
    for (Agent i = 0; i < I.agents(); ++i)
      for (unsigned mask = 1; mask < (1u << I.goods()); ++mask) {
        std::vector<Good> B;
        Value v = 0;
        for (Good g = 0; g < I.goods(); ++g)
          if (mask >> g & 1) {
            B.push_back(g);
            v += I.value(i, g);
          }
        const double u = bundle_utility(I, i, B), us = bundle_utility_star(I, i, B);
        ++bundles;
        if (u < us - 1e-12) ++below;
        if (us > 0 && u / us > approx_factor(double(v) / double(I.endowment(i))) + 1e-12) ++above;
      }
  }
  const double rel = relative_error_bound(0.1);
  return {below == 0 && above == 0 && rel <= 0.05271,
          fmt("%ld bundles, u<u* %ld, ratio>f(C) %ld, bound(0.1)=%.6f", bundles, below, above, rel)};
}

Outcome convergence() {
  Instance I = generate_random({6, 5, 100, 500, 0});
  for (std::uint64_t s = 1; ; ++s) {
    bool unique = true;
    for (Good g = 0; g < I.goods(); ++g) unique = unique && ratio_argmax(I, g).size() == 1;
    if (unique) break;
    I = generate_random({6, 5, 100, 500, s});
  }
  const int runs = 500;
  int converged = 0, full_ok = 0;
  for (int r = 0; r < runs; ++r) {
    converged += simulate(I, {3, 60, derive_seed(41, {std::uint64_t(r)}), RandomStart{}}).converged;
    full_ok += simulate(I, {6, 1, derive_seed(43, {std::uint64_t(r)}), RandomStart{}}).converged;
  }
  const double bound = convergence_bound(6, 5, 3, 60), freq = double(converged) / runs;
  const double slack = kZ99 * std::sqrt(bound * (1 - bound) / runs);
  return {freq >= bound - slack && full_ok == runs,
          fmt("k=3: %d/%d converged (bound %.5f, slack %.5f); k=n: %d/%d in one round", converged, runs, bound, slack,
              full_ok, runs)};
}

Outcome band_guarantee() {
  long pairs = 0, violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(derive_seed(51, {s}));
    const int n = 2 + uniform_index(rng, 5), m = 1 + uniform_index(rng, 8);
    const Value low = 1 + uniform_index(rng, 5), high = low + uniform_index(rng, int(2 * low + 1));
    ValueMatrix v(n, m);
    std::uniform_int_distribution<Value> val(low, high);
    for (Agent i = 0; i < n; ++i)
      for (Good g = 0; g < m; ++g) v(i, g) = uniform_index(rng, 3) == 0 ? 0 : val(rng);
    ValueVector e(n);
    for (Agent i = 0; i < n; ++i) e(i) = 1 + uniform_index(rng, 60);
    const Instance I = new_instance(v, e);
    const PartialErefReport r = eref_partial_0lh(I, decentralized_solution(I));
    pairs += long(r.guaranteed.size());
    violations += long(r.violations.size());
  }
  return {violations == 0 && pairs > 0, fmt("1000 instances, %ld guaranteed pairs, %ld violations", pairs, violations)};
}

Outcome expectation_guarantee() {
  const MCConfig cfg{{1, 2, 4}, {1.0, 2.0}, 100000, 61};
  Outcome o{true, ""};
  for (Agent i = 0; i < 3; ++i)
    for (Agent j = 0; j < 3; ++j) {
      if (i == j || cfg.endowments[std::size_t(i)] > cfg.endowments[std::size_t(j)]) continue;
      const ExpectationReport r = mc_eref_expectation(cfg, i, j);
      const bool ok = r.basic != Verdict::Violated && r.strengthened != Verdict::Violated;
      o.pass = o.pass && ok;
      o.detail += fmt("(%d,%d) %s/%s; ", i, j, to_string(r.basic), to_string(r.strengthened));
    }
  // Quadrature oracle for n=2, m=1, U[0,1], e=(1,2).
  double own = 0, other = 0;
  const int steps = 2000;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < steps; ++b) {
      const double v1 = (a + 0.5) / steps, v2 = (b + 0.5) / steps;
      (v1 >= v2 / 2 ? own : other) += v1 / (double(steps) * steps);
    }
  const ExpectationReport q = mc_eref_expectation({{1, 2}, {1.0}, 100000, 62}, 0, 1);
  const double d1 = std::abs(q.own.mean - own) / q.own.stderr_, d2 = std::abs(q.other.mean - other) / q.other.stderr_;
  o.pass = o.pass && d1 <= 3 && d2 <= 3;
  o.detail += fmt("quadrature within %.2f and %.2f stderr", d1, d2);
  return o;
}

Outcome probability_guarantee() {
  const MCConfig cfg{{1, 2, 3}, {1.0, 1.0, 1.0, 1.0}, 100000, 71};
  Outcome o{true, ""};
  for (Agent i = 0; i < 3; ++i)
    for (Agent j = i + 1; j < 3; ++j) {
      const ProbabilityReport r = mc_eref_probability(cfg, i, j);
      o.pass = o.pass && r.verdict != Verdict::Violated;
      o.detail += fmt("(%d,%d) %.4f vs bound %.4f %s; ", i, j, r.empirical.mean, r.bound, to_string(r.verdict));
    }
  return o;
}

Outcome sweep() {
  SweepConfig cfg;  // n=10, m=20, 100 trials, default grid, local search with 20 restarts
  cfg.seed = 2023;
  const auto t0 = std::chrono::steady_clock::now();
  const auto raw = run_sweep(cfg);
  const auto agg = aggregate(raw);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!work_dir.empty()) {
    fs::create_directories(work_dir);
    write_text(work_dir / "raw.csv", write_raw_csv(raw));
    write_text(work_dir / "agg.csv", write_agg_csv(agg));
  }
  const auto series = [&](Mechanism mech) {
    std::vector<MeanEstimate> out;
    for (const auto& a : agg)
      if (a.mechanism == mech) out.push_back(a.ratio);
    return out;
  };
  const auto dec = series(Mechanism::DEC), cen = series(Mechanism::CEN), cen3 = series(Mechanism::CEN3R);
  const auto& grid = cfg.grid;
  const std::size_t G = grid.size();

  std::size_t dip = 0;
  for (std::size_t k = 1; k < G; ++k)
    if (dec[k].mean < dec[dip].mean) dip = k;
  bool dec_rising = true, overtakes = false, cen_falling = true;
  for (std::size_t k = dip; k + 1 < G; ++k)
    dec_rising = dec_rising && dec[k + 1].mean >= dec[k].mean - (dec[k].stderr_ + dec[k + 1].stderr_);
  for (std::size_t k = 0; k < G; ++k)
    if (grid[k] >= 2000 && grid[k] <= 10000 && dec[k].mean > cen[k].mean) overtakes = true;
  for (std::size_t k = 0; k + 1 < G; ++k)
    cen_falling = cen_falling && cen[k + 1].mean <= cen[k].mean + (cen[k].stderr_ + cen[k + 1].stderr_);
  const bool improves = cen3[G - 1].mean >= cen[G - 1].mean && cen3[G - 2].mean >= cen[G - 2].mean;

  std::string detail = fmt("%.0fs; (a) dip at e_max=%lld, rising %s, overtakes in [2e3,1e4] %s; (b) CEN falling %s; "
                           "(c) CEN+3R>=CEN at top two %s; DEC/CEN at 5000: %.3f/%.3f",
                           secs, (long long)grid[dip], dec_rising ? "yes" : "no", overtakes ? "yes" : "no",
                           cen_falling ? "yes" : "no", improves ? "yes" : "no", dec[7].mean, cen[7].mean);
  return {dec_rising && overtakes && cen_falling && improves, detail};
}

std::string slurp(const fs::path& p) { return fs::exists(p) ? read_text(p) : std::string("<missing>"); }

Outcome determinism() {
  if (cli_path.empty()) return {false, "no CLI path given"};
  const fs::path dir = fs::temp_directory_path() / "fairdiv_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string inst = (dir / "inst.json").string(), cen = (dir / "cen.json").string();
  const std::string cfg = (dir / "sweep.json").string();
  write_text(cfg, R"({"n": 4, "m": 6, "grid": [1, 100, 10000], "trials": 4, "seed": 5,
                      "opt_engine": {"engine": "ls", "restarts": 5}, "cen_engine": {"engine": "ls", "restarts": 5}})");

  // Each entry: command line (with {out} for a side file) run twice.
  const std::vector<std::string> commands = {
      "gen --n 4 --m 6 --emax 1000 --seed 17 -o " + inst,
      "gen --family example1 --n 3 --eps 0.01",
      "gen --family example2 --x 8 --eps 0.1",
      "gen --family chain --n 10 --x 0.25",
      "gen --family breakdown --n 2 --m 2 --eps 1",
      "bounds " + inst,
      "solve " + inst + " --objective opt --engine oracle",
      "solve " + inst + " --objective cen --engine bnb -o " + cen,
      "solve " + inst + " --objective opt --engine ls --restarts 4 --seed 3",
      "check " + inst + " --alloc " + cen + " --fairness",
      "simulate " + inst + " --k 2 --rounds 12 --seed 8 --initial random --trace-out {out}",
      "simulate " + inst + " --k 3 --rounds 4 --seed 8 --initial cen",
      "simulate " + inst + " --k 2 --rounds 4 --seed 8 --initial file:" + cen,
      "mc-eref --n 3 --endowments 1,2,4 --mg 1,2 --trials 3000 --seed 4 --mode expectation --csv {out}",
      "mc-eref --endowments 1,2,3 --mg 1,1,1,1 --trials 3000 --seed 4 --mode probability",
      "sweep --config " + cfg + " -o {out}",
  };
  int differing = 0, failed = 0;
  std::string which;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path side = dir / fmt("side_%zu_%d", c, rep);
      std::string cmd = commands[c];
      if (auto p = cmd.find("{out}"); p != std::string::npos) cmd.replace(p, 5, side.string());
      const fs::path stdout_file = dir / fmt("stdout_%zu_%d", c, rep);
      const std::string line = "\"" + cli_path + "\" " + cmd + " > \"" + stdout_file.string() + "\"";
      if (std::system(line.c_str()) != 0) ++failed;
      std::string stdout_text = slurp(stdout_file);
      // The sweep echoes its output directory; compare everything else.
      if (auto p = stdout_text.find(side.string()); p != std::string::npos) stdout_text.clear();
      outputs[rep] = stdout_text;
      if (fs::is_directory(side)) {
        outputs[rep] += slurp(side / "raw.csv") + slurp(side / "agg.csv");
      } else if (fs::exists(side)) {
        outputs[rep] += slurp(side);
      }
    }
    if (outputs[0] != outputs[1]) {
      ++differing;
      which += " [" + commands[c].substr(0, commands[c].find(' ')) + "]";
    }
  }
  // Same-seed generation agrees with a file written earlier.
  fs::remove_all(dir);
  return {differing == 0 && failed == 0,
          fmt("%zu commands run twice, %d differ, %d exited non-zero%s", commands.size(), differing, failed,
              which.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cli_path = argv[1];
  if (argc > 2) work_dir = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"z-table", z_table},
      {"oracle-equivalence", oracle_equivalence},
      {"small-examples", examples},
      {"decentralized-bound", decentralized_bound},
      {"chain-family-gap", chain_family},
      {"centralized-bound", centralized_bound},
      {"breakdown-instance", breakdown},
      {"utility-decomposition", utility_bounds},
      {"exchange-convergence", convergence},
      {"band-eref", band_guarantee},
      {"eref-expectation", expectation_guarantee},
      {"eref-probability", probability_guarantee},
      {"sweep-trends", sweep},
      {"cli-determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt("%.1fs", secs) << "): " << o.detail << std::endl;
    failures += !o.pass;
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
