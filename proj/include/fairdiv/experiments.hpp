#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairdiv/io.hpp"
#include "fairdiv/solver.hpp"
#include "fairdiv/stats.hpp"

namespace fairdiv {

enum class Mechanism { CEN, DEC, CEN3R, RAND3R };

std::string_view to_string(Mechanism mech);
Mechanism parse_mechanism(std::string_view text);

struct EngineChoice {
  Engine engine = Engine::LocalSearch;
  SolveOptions options;
};

struct SweepConfig {
  int n = 10;
  int m = 20;
  std::vector<Value> grid{1, 2, 5, 10, 100, 1000, 2500, 5000, 10000, 100000};
  int trials = 100;
  std::vector<Mechanism> mechanisms{Mechanism::CEN, Mechanism::DEC, Mechanism::CEN3R, Mechanism::RAND3R};
  EngineChoice opt_engine;
  EngineChoice cen_engine;
  std::uint64_t seed = 0;
  Value total_valuation = 500;
  int threads = 0;  // 0 = hardware concurrency
};

class SweepConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const SweepConfig& cfg);
SweepConfig parse_sweep_config(const std::string& text);
Json to_json(const SweepConfig& cfg);

struct SweepRecord {
  int n = 0, m = 0;
  Value e_max = 0;
  Mechanism mechanism = Mechanism::CEN;
  int trial = 0;
  std::uint64_t seed = 0;  // instance seed
  double ratio = 0.0;
  bool exact = false;      // OPT came from an exact engine that finished
};

struct AggregateRecord {
  int n = 0, m = 0;
  Value e_max = 0;
  Mechanism mechanism = Mechanism::CEN;
  MeanEstimate ratio;
  bool low_count = false;  // fewer than two trials
};

std::uint64_t instance_seed(std::uint64_t master, Value e_max, int trial);
std::uint64_t mechanism_seed(std::uint64_t master, Value e_max, int trial, Mechanism mech);

/// Records for one (e_max, trial) cell, in cfg.mechanisms order.
std::vector<SweepRecord> run_cell(const SweepConfig& cfg, Value e_max, int trial);

/// All cells, sorted by (e_max, trial, mechanism).
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

/// Groups by (n, m, e_max, mechanism), sorted by that key.
std::vector<AggregateRecord> aggregate(const std::vector<SweepRecord>& raw);

inline constexpr std::string_view kRawSchema = "# fairdiv-raw v1";
inline constexpr std::string_view kAggSchema = "# fairdiv-agg v1";

std::string write_raw_csv(const std::vector<SweepRecord>& raw);
std::vector<SweepRecord> parse_raw_csv(const std::string& text);
std::string write_agg_csv(const std::vector<AggregateRecord>& agg);
std::vector<AggregateRecord> parse_agg_csv(const std::string& text);

/// Runs the sweep and writes raw.csv and agg.csv into dir.
void run_sweep_to(const SweepConfig& cfg, const std::filesystem::path& dir);

}  // namespace fairdiv
