// fairdiv command-line front end. Every command prints JSON on stdout.
#include <CLI11.hpp>

#include <cmath>
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

namespace {

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json estimate_json(const MeanEstimate& e) {
  return Json{{"mean", e.mean}, {"stderr", e.stderr_}, {"count", e.count}, {"ci99", {e.lower(), e.upper()}}};
}

Json pair_json(const std::optional<AgentPair>& p) {
  return p ? Json::array({p->first, p->second}) : Json(nullptr);
}

Json owners_json(const Allocation& a) { return Json(std::vector<Agent>(a.owners().begin(), a.owners().end())); }

Json check_json(const CheckResult& c) { return Json{{"ok", c.ok}, {"witness", pair_json(c.witness)}}; }

void emit(const Json& j, const std::string& path = {}) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---- gen

struct GenArgs {
  int n = 3, m = 6;
  Value emax = 10, total = 500;
  std::uint64_t seed = 0;
  std::string family = "random", eps = "0.01", x = "1", out;
};

void cmd_gen(const GenArgs& a) {
  Instance inst = [&] {
    if (a.family == "random") return generate_random({a.n, a.m, a.emax, a.total, a.seed});
    if (a.family == "example1") return generate_example1(a.n, parse_rational(a.eps));
    if (a.family == "example2") return generate_example2(parse_rational(a.x), parse_rational(a.eps));
    if (a.family == "chain" || a.family == "thm2") return generate_chain_family(a.n, parse_rational(a.x));
    if (a.family == "breakdown") return generate_breakdown_instance(a.n, a.m, parse_rational(a.eps));
    throw CLI::ValidationError("--family", "unknown family " + a.family);
  }();
  const std::string text = serialize(inst);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
}

// ---- bounds

void cmd_bounds(const std::string& file, std::int64_t timeout_ms) {
  const Instance inst = parse_instance(read_text(file));
  double sum_log = 0.0;
  for (Agent i = 0; i < inst.agents(); ++i) sum_log += std::log2(double(inst.endowment(i))) - std::log2(double(inst.scale()));
  bool wanted = true;
  for (Good g = 0; g < inst.goods(); ++g) wanted = wanted && inst.valuations().col(g).maxCoeff() > 0;

  Json alpha = nullptr;
  if (inst.valuations().maxCoeff() > 0) {
    const Rational a = alpha_of(inst);
    alpha = Json{{"value", to_double(a)}, {"exact", a.str()}};
  }
  SolveOptions opts;
  opts.timeout = std::chrono::milliseconds(timeout_ms);
  const BreakdownReport br = breakdown_check(inst, opts);
  Json breakdown{{"precondition", br.precondition},
                 {"reason", br.reason},
                 {"condition", br.condition},
                 {"pair", pair_json(br.pair)},
                 {"nw_central", br.nw_central ? Json(*br.nw_central) : Json(nullptr)},
                 {"nw_optimal", br.nw_optimal ? Json(*br.nw_optimal) : Json(nullptr)},
                 {"gap_confirmed", br.gap_confirmed ? Json(*br.gap_confirmed) : Json(nullptr)}};
  emit(Json{{"n", inst.agents()},
            {"m", inst.goods()},
            {"z", z_of(inst)},
            {"max_value_ratio", max_value_ratio(inst).str()},
            {"alpha", alpha},
            {"sum_log2_endowments", sum_log},
            {"baseline_nash", baseline_nash(inst)},
            {"decentralized_bound", {{"precondition", endowment_log_sum_nonnegative(inst)}}},
            {"centralized_bound", {{"every_good_wanted", wanted}, {"every_agent_served", "depends on the allocations"}}},
            {"breakdown", breakdown}});
}

// ---- check

void cmd_check(const std::string& file, const std::string& alloc_file, const std::string& opt_file, bool fairness) {
  const Instance inst = parse_instance(read_text(file));
  const AllocationFile af = parse_allocation(read_text(alloc_file));
  require_compatible(inst, af.allocation);
  std::optional<AllocationFile> opt;
  if (!opt_file.empty()) {
    opt = parse_allocation(read_text(opt_file));
    require_compatible(inst, opt->allocation);
  }
  const WelfareReport w = welfare_report(inst, af.allocation, opt ? &opt->allocation : nullptr);
  Json out{{"welfare",
            {{"nash", w.nash},
             {"utilitarian", w.utilitarian},
             {"egalitarian", w.egalitarian},
             {"baseline_nash", w.baseline_nash},
             {"marginal_ratio", w.marginal_ratio ? number_or_null(*w.marginal_ratio) : Json(nullptr)}}}};
  if (fairness) {
    const FairnessReport f = fairness_report(inst, af.allocation);
    Json guaranteed = Json::array(), violations = Json::array();
    for (const auto& p : f.partial.guaranteed) guaranteed.push_back({p.first, p.second});
    for (const auto& p : f.partial.violations) violations.push_back({p.first, p.second});
    out["fairness"] = Json{
        {"ef1", check_json(f.ef1)},
        {"eref", check_json(f.eref)},
        {"eref_0lh",
         {{"band", f.partial.band ? Json::array({f.partial.band->low, f.partial.band->high}) : Json(nullptr)},
          {"decentralized", f.partial.decentralized},
          {"guaranteed_pairs", guaranteed},
          {"violations", violations}}}};
  }
  emit(out);
}

// ---- solve

struct SolveArgs {
  std::string file, objective = "opt", engine = "oracle", out;
  int restarts = 20;
  std::uint64_t seed = 0;
  std::int64_t timeout_ms = 0;
};

void cmd_solve(const SolveArgs& a) {
  const Instance inst = parse_instance(read_text(a.file));
  SolveOptions opts;
  opts.restarts = a.restarts;
  opts.seed = a.seed;
  opts.timeout = std::chrono::milliseconds(a.timeout_ms);
  const Objective obj = parse_objective(a.objective);
  const SolveResult r = solve(inst, obj, parse_engine(a.engine), opts);
  Json meta{{"objective", std::string(to_string(obj))},
            {"engine", std::string(to_string(r.engine))},
            {"exact", r.exact},
            {"score", {{"positive_agents", r.score.count}, {"sum_log2", r.score.sum_log}}},
            {"nash", nash_welfare(inst, r.allocation)},
            {"work", r.work}};
  if (r.seed) meta["seed"] = *r.seed;
  const std::string text = serialize(AllocationFile{r.allocation, meta});
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
}

// ---- simulate

struct SimArgs {
  std::string file, initial = "random", trace_out;
  int k = 2, rounds = 10;
  std::uint64_t seed = 0;
};

void cmd_simulate(const SimArgs& a) {
  const Instance inst = parse_instance(read_text(a.file));
  ExchangeConfig cfg;
  cfg.k = a.k;
  cfg.rounds = a.rounds;
  cfg.seed = a.seed;
  if (a.initial == "random") {
    cfg.initial = RandomStart{};
  } else if (a.initial == "cen") {
    cfg.initial = CentralizedStart{};
  } else if (a.initial.rfind("file:", 0) == 0) {
    const AllocationFile af = parse_allocation(read_text(a.initial.substr(5)));
    require_compatible(inst, af.allocation);
    cfg.initial = af.allocation;
  } else {
    throw CLI::ValidationError("--initial", "expected random, cen or file:PATH");
  }
  const ExchangeTrace trace = simulate(inst, cfg);
  if (!a.trace_out.empty()) write_text(a.trace_out, serialize_trace(trace));
  std::size_t moves = 0;
  for (const auto& r : trace.rounds) moves += r.moves.size();
  emit(Json{{"k", trace.k},
            {"rounds", trace.rounds.size()},
            {"seed", trace.seed},
            {"moves", moves},
            {"initial_owner", owners_json(trace.initial)},
            {"final_owner", owners_json(trace.final_allocation)},
            {"converged", trace.converged},
            {"nash_initial", nash_welfare(inst, trace.initial)},
            {"nash_final", nash_welfare(inst, trace.final_allocation)},
            {"convergence_bound", convergence_bound(inst.agents(), inst.goods(), trace.k, int(trace.rounds.size()))}});
}

// ---- mc-eref

struct McArgs {
  int n = 0;
  std::string endowments, mg, mode = "expectation", csv;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;
};

void cmd_mc(const McArgs& a) {
  MCConfig cfg;
  for (const auto& s : split_list(a.endowments)) cfg.endowments.push_back(std::stoll(s));
  for (const auto& s : split_list(a.mg)) cfg.upper.push_back(std::stod(s));
  if (a.n != 0 && a.n != cfg.agents())
    throw CLI::ValidationError("--n", "does not match the number of endowments");
  cfg.trials = a.trials;
  cfg.seed = a.seed;

  Json reports = Json::array();
  std::string csv;
  const bool expectation = a.mode == "expectation";
  if (!expectation && a.mode != "probability") throw CLI::ValidationError("--mode", "expected expectation or probability");
  csv = expectation ? "i,j,own_mean,own_stderr,other_mean,other_stderr,diff_mean,diff_stderr,scaled_mean,scaled_stderr,"
                      "basic,strengthened\n"
                    : "i,j,empirical,stderr,bound,verdict\n";
  for (Agent i = 0; i < cfg.agents(); ++i) {
    for (Agent j = 0; j < cfg.agents(); ++j) {
      if (i == j || cfg.endowments[std::size_t(i)] > cfg.endowments[std::size_t(j)]) continue;
      std::ostringstream row;
      row.precision(17);
      if (expectation) {
        const ExpectationReport r = mc_eref_expectation(cfg, i, j);
        reports.push_back({{"i", i},
                           {"j", j},
                           {"own", estimate_json(r.own)},
                           {"other", estimate_json(r.other)},
                           {"diff", estimate_json(r.diff)},
                           {"scaled_diff", estimate_json(r.scaled_diff)},
                           {"basic", to_string(r.basic)},
                           {"strengthened", to_string(r.strengthened)}});
        row << i << ',' << j << ',' << r.own.mean << ',' << r.own.stderr_ << ',' << r.other.mean << ','
            << r.other.stderr_ << ',' << r.diff.mean << ',' << r.diff.stderr_ << ',' << r.scaled_diff.mean << ','
            << r.scaled_diff.stderr_ << ',' << to_string(r.basic) << ',' << to_string(r.strengthened) << '\n';
      } else {
        const ProbabilityReport r = mc_eref_probability(cfg, i, j);
        reports.push_back({{"i", i},
                           {"j", j},
                           {"empirical", estimate_json(r.empirical)},
                           {"per_good", r.per_good.str()},
                           {"bound", r.bound},
                           {"verdict", to_string(r.verdict)}});
        row << i << ',' << j << ',' << r.empirical.mean << ',' << r.empirical.stderr_ << ',' << r.bound << ','
            << to_string(r.verdict) << '\n';
      }
      csv += row.str();
    }
  }
  if (!a.csv.empty()) write_text(a.csv, csv);
  emit(Json{{"mode", a.mode}, {"trials", cfg.trials}, {"seed", cfg.seed}, {"reports", reports}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash-welfare allocation toolkit with endowments"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate an instance");
  g->add_option("--n", gen.n, "agents");
  g->add_option("--m", gen.m, "goods");
  g->add_option("--emax", gen.emax, "largest endowment (random family)");
  g->add_option("--total", gen.total, "per-agent valuation total (random family)");
  g->add_option("--seed", gen.seed);
  g->add_option("--family", gen.family, "thm2 is an alias of chain")->check(CLI::IsMember({"random", "example1", "example2", "chain", "thm2", "breakdown"}));
  g->add_option("--eps", gen.eps, "small valuation (example1, example2, breakdown)");
  g->add_option("--x", gen.x, "endowment parameter (example2, chain)");
  g->add_option("-o,--out", gen.out, "output file (stdout if omitted)");

  std::string bounds_file;
  std::int64_t bounds_timeout = 10000;
  auto* b = app.add_subcommand("bounds", "report z, alpha and precondition status");
  b->add_option("file", bounds_file)->required();
  b->add_option("--timeout-ms", bounds_timeout, "deadline for the exact solves of the breakdown check");

  std::string check_file, check_alloc, check_opt;
  bool check_fair = false;
  auto* c = app.add_subcommand("check", "welfare and fairness report for an allocation");
  c->add_option("file", check_file)->required();
  c->add_option("--alloc", check_alloc)->required();
  c->add_option("--opt", check_opt, "optimal allocation, enables the marginal ratio");
  c->add_flag("--fairness", check_fair);

  SolveArgs sa;
  auto* s = app.add_subcommand("solve", "maximize Nash welfare");
  s->add_option("file", sa.file)->required();
  s->add_option("--objective", sa.objective)->check(CLI::IsMember({"opt", "cen"}));
  s->add_option("--engine", sa.engine)->check(CLI::IsMember({"oracle", "bnb", "ls"}));
  s->add_option("--restarts", sa.restarts);
  s->add_option("--seed", sa.seed);
  s->add_option("--timeout-ms", sa.timeout_ms);
  s->add_option("-o,--out", sa.out);

  SimArgs sim;
  auto* sm = app.add_subcommand("simulate", "run the good-exchange process");
  sm->add_option("file", sim.file)->required();
  sm->add_option("--k", sim.k);
  sm->add_option("--rounds", sim.rounds);
  sm->add_option("--seed", sim.seed);
  sm->add_option("--initial", sim.initial, "random | cen | file:PATH");
  sm->add_option("--trace-out", sim.trace_out);

  McArgs mc;
  auto* mce = app.add_subcommand("mc-eref", "Monte Carlo estimates of endowment-relative envy");
  mce->add_option("--n", mc.n);
  mce->add_option("--endowments", mc.endowments, "comma-separated integers")->required();
  mce->add_option("--mg", mc.mg, "comma-separated uniform upper bounds, one per good")->required();
  mce->add_option("--trials", mc.trials);
  mce->add_option("--seed", mc.seed);
  mce->add_option("--mode", mc.mode)->check(CLI::IsMember({"expectation", "probability"}));
  mce->add_option("--csv", mc.csv, "also write a CSV table here");

  std::string sweep_config, sweep_out;
  int sweep_threads = -1;
  auto* sw = app.add_subcommand("sweep", "approximation-ratio sweep over e_max");
  sw->add_option("--config", sweep_config)->required();
  sw->add_option("-o,--out", sweep_out)->required();
  sw->add_option("--threads", sweep_threads, "override the config's thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) cmd_gen(gen);
    if (*b) cmd_bounds(bounds_file, bounds_timeout);
    if (*c) cmd_check(check_file, check_alloc, check_opt, check_fair);
    if (*s) cmd_solve(sa);
    if (*sm) cmd_simulate(sim);
    if (*mce) cmd_mc(mc);
    if (*sw) {
      SweepConfig cfg = parse_sweep_config(read_text(sweep_config));
      if (sweep_threads >= 0) cfg.threads = sweep_threads;
      run_sweep_to(cfg, sweep_out);
      emit(Json{{"config", to_json(cfg)}, {"raw", sweep_out + "/raw.csv"}, {"agg", sweep_out + "/agg.csv"}});
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
