#include "fairdiv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "fairdiv/decentralized.hpp"
#include "fairdiv/generators.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/welfare.hpp"

namespace fairdiv {

std::string_view to_string(Mechanism mech) {
  switch (mech) {
    case Mechanism::CEN: return "CEN";
    case Mechanism::DEC: return "DEC";
    case Mechanism::CEN3R: return "CEN+3R";
    case Mechanism::RAND3R: return "RAND+3R";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view text) {
  for (Mechanism m : {Mechanism::CEN, Mechanism::DEC, Mechanism::CEN3R, Mechanism::RAND3R})
    if (to_string(m) == text) return m;
  throw std::invalid_argument("unknown mechanism '" + std::string(text) + "'");
}

void validate(const SweepConfig& cfg) {
  if (cfg.n < 1 || cfg.m < 1) throw SweepConfigError("n and m must be positive");
  if (cfg.trials < 1) throw SweepConfigError("trials must be at least 1");
  if (cfg.grid.empty()) throw SweepConfigError("e_max grid is empty");
  for (Value e : cfg.grid)
    if (e < 1) throw SweepConfigError("grid values must be >= 1");
  if (cfg.mechanisms.empty()) throw SweepConfigError("no mechanisms selected");
  if (cfg.total_valuation < 0) throw SweepConfigError("total_valuation must be non-negative");
  for (const EngineChoice* e : {&cfg.opt_engine, &cfg.cen_engine})
    if (e->engine == Engine::LocalSearch && e->options.restarts < 1) throw SweepConfigError("restarts must be >= 1");
}

namespace {

EngineChoice parse_engine_choice(const Json& j) {
  EngineChoice c;
  c.engine = parse_engine(j.value("engine", std::string("ls")));
  c.options.restarts = j.value("restarts", c.options.restarts);
  c.options.timeout = std::chrono::milliseconds(j.value("timeout_ms", std::int64_t{0}));
  c.options.enumeration_cap = j.value("enumeration_cap", c.options.enumeration_cap);
  return c;
}

Json engine_json(const EngineChoice& c) {
  return Json{{"engine", std::string(to_string(c.engine))},
              {"restarts", c.options.restarts},
              {"timeout_ms", std::int64_t(c.options.timeout.count())},
              {"enumeration_cap", c.options.enumeration_cap}};
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig cfg;
  try {
    const Json j = Json::parse(text);
    cfg.n = j.value("n", cfg.n);
    cfg.m = j.value("m", cfg.m);
    if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<Value>>();
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("mechanisms")) {
      cfg.mechanisms.clear();
      for (const auto& m : j.at("mechanisms")) cfg.mechanisms.push_back(parse_mechanism(m.get<std::string>()));
    }
    if (j.contains("opt_engine")) cfg.opt_engine = parse_engine_choice(j.at("opt_engine"));
    if (j.contains("cen_engine")) cfg.cen_engine = parse_engine_choice(j.at("cen_engine"));
    cfg.seed = j.value("seed", cfg.seed);
    cfg.total_valuation = j.value("total_valuation", cfg.total_valuation);
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const Json::exception& e) {
    throw SweepConfigError(std::string("sweep config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

Json to_json(const SweepConfig& cfg) {
  Json mechs = Json::array();
  for (Mechanism m : cfg.mechanisms) mechs.push_back(std::string(to_string(m)));
  return Json{{"n", cfg.n},
              {"m", cfg.m},
              {"grid", cfg.grid},
              {"trials", cfg.trials},
              {"mechanisms", mechs},
              {"opt_engine", engine_json(cfg.opt_engine)},
              {"cen_engine", engine_json(cfg.cen_engine)},
              {"seed", cfg.seed},
              {"total_valuation", cfg.total_valuation},
              {"threads", cfg.threads}};
}

std::uint64_t instance_seed(std::uint64_t master, Value e_max, int trial) {
  return derive_seed(master, {std::uint64_t(e_max), std::uint64_t(trial)});
}

std::uint64_t mechanism_seed(std::uint64_t master, Value e_max, int trial, Mechanism mech) {
  return derive_seed(master, {std::uint64_t(e_max), std::uint64_t(trial), std::uint64_t(mech) + 1});
}

std::vector<SweepRecord> run_cell(const SweepConfig& cfg, Value e_max, int trial) {
  const std::uint64_t iseed = instance_seed(cfg.seed, e_max, trial);
  const Instance inst = generate_random({cfg.n, cfg.m, e_max, cfg.total_valuation, iseed});

  auto run = [&](const EngineChoice& choice, Objective obj, std::uint64_t seed) {
    SolveOptions opts = choice.options;
    opts.seed = seed;
    return solve(inst, obj, choice.engine, opts);
  };
  // OPT gets its own stream so that the CEN engine seed stays tied to the CEN mechanism.
  const SolveResult opt = run(cfg.opt_engine, Objective::WithEndowments, derive_seed(iseed, {0}));
  std::optional<SolveResult> cen;
  auto central = [&]() -> const Allocation& {
    if (!cen) cen = run(cfg.cen_engine, Objective::GoodsOnly, mechanism_seed(cfg.seed, e_max, trial, Mechanism::CEN));
    return cen->allocation;
  };

  std::vector<SweepRecord> out;
  for (Mechanism mech : cfg.mechanisms) {
    const std::uint64_t mseed = mechanism_seed(cfg.seed, e_max, trial, mech);
    std::optional<Allocation> alloc;
    switch (mech) {
      case Mechanism::CEN: alloc = central(); break;
      case Mechanism::DEC: alloc = decentralized_solution(inst); break;
      case Mechanism::CEN3R: alloc = run_partial(inst, central(), mseed); break;
      case Mechanism::RAND3R: {
        Rng rng(mseed);
        const Allocation start = random_allocation(inst.agents(), inst.goods(), rng);
        alloc = run_partial(inst, start, derive_seed(mseed, {1}));
        break;
      }
    }
    SweepRecord rec{cfg.n, cfg.m, e_max, mech, trial, iseed, 0.0, opt.exact};
    try {
      rec.ratio = marginal_ratio(inst, *alloc, opt.allocation);
    } catch (const UndefinedRatio&) {
      rec.ratio = std::nan("");
      rec.exact = false;
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  std::vector<std::pair<Value, int>> cells;
  for (Value e : cfg.grid)
    for (int t = 0; t < cfg.trials; ++t) cells.emplace_back(e, t);

  std::vector<std::vector<SweepRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells.size();)
      results[c] = run_cell(cfg, cells[c].first, cells[c].second);
  };
  unsigned threads = cfg.threads > 0 ? unsigned(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SweepRecord> raw;
  for (auto& r : results) raw.insert(raw.end(), r.begin(), r.end());
  std::stable_sort(raw.begin(), raw.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.e_max, a.trial, a.mechanism) < std::tie(b.e_max, b.trial, b.mechanism);
  });
  return raw;
}

std::vector<AggregateRecord> aggregate(const std::vector<SweepRecord>& raw) {
  if (raw.empty()) throw std::invalid_argument("aggregate: no rows");
  using Key = std::tuple<int, int, Value, Mechanism>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : raw) groups[{r.n, r.m, r.e_max, r.mechanism}].push_back(r.ratio);
  std::vector<AggregateRecord> out;
  for (const auto& [key, ratios] : groups) {
    AggregateRecord a;
    std::tie(a.n, a.m, a.e_max, a.mechanism) = key;
    a.ratio = estimate_mean(ratios);
    a.low_count = ratios.size() < 2;
    out.push_back(a);
  }
  return out;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::string_view schema,
                                               std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != schema)
    throw std::invalid_argument("csv: expected schema line '" + std::string(schema) + "'");
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing column header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != columns) throw std::invalid_argument("csv: wrong column count in '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string write_raw_csv(const std::vector<SweepRecord>& raw) {
  std::string out(kRawSchema);
  out += "\nn,m,e_max,mechanism,trial,seed,ratio,exact\n";
  for (const auto& r : raw) {
    out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.e_max) + ',' +
           std::string(to_string(r.mechanism)) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           fmt_double(r.ratio) + ',' + (r.exact ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<SweepRecord> parse_raw_csv(const std::string& text) {
  std::vector<SweepRecord> out;
  for (const auto& c : csv_rows(text, kRawSchema, 8)) {
    out.push_back({std::stoi(c[0]), std::stoi(c[1]), std::stoll(c[2]), parse_mechanism(c[3]), std::stoi(c[4]),
                   std::stoull(c[5]), std::stod(c[6]), c[7] == "1"});
  }
  return out;
}

std::string write_agg_csv(const std::vector<AggregateRecord>& agg) {
  std::string out(kAggSchema);
  out += "\nn,m,e_max,mechanism,mean,stderr,count,low_count\n";
  for (const auto& a : agg) {
    out += std::to_string(a.n) + ',' + std::to_string(a.m) + ',' + std::to_string(a.e_max) + ',' +
           std::string(to_string(a.mechanism)) + ',' + fmt_double(a.ratio.mean) + ',' + fmt_double(a.ratio.stderr_) +
           ',' + std::to_string(a.ratio.count) + ',' + (a.low_count ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<AggregateRecord> parse_agg_csv(const std::string& text) {
  std::vector<AggregateRecord> out;
  for (const auto& c : csv_rows(text, kAggSchema, 8)) {
    AggregateRecord a;
    a.n = std::stoi(c[0]);
    a.m = std::stoi(c[1]);
    a.e_max = std::stoll(c[2]);
    a.mechanism = parse_mechanism(c[3]);
    a.ratio.mean = std::stod(c[4]);
    a.ratio.stderr_ = std::stod(c[5]);
    a.ratio.count = std::stoull(c[6]);
    a.low_count = c[7] == "1";
    out.push_back(a);
  }
  return out;
}

void run_sweep_to(const SweepConfig& cfg, const std::filesystem::path& dir) {
  const auto raw = run_sweep(cfg);
  std::filesystem::create_directories(dir);
  write_text(dir / "raw.csv", write_raw_csv(raw));
  write_text(dir / "agg.csv", write_agg_csv(aggregate(raw)));
}

}  // namespace fairdiv
