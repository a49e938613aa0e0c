#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fairdiv/instance.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/stats.hpp"

namespace fairdiv {

using AgentPair = std::pair<Agent, Agent>;

struct CheckResult {
  bool ok = true;
  std::optional<AgentPair> witness;  // first violating (i, j) in row-major order
};

/// Envy-free up to one good: for all i, j with A_j non-empty,
/// v_i(A_i) >= v_i(A_j) - max_{g in A_j} v_i(g).
CheckResult is_ef1(const Instance& inst, const Allocation& alloc);

/// Endowment-relative envy-freeness: e_i < e_j implies v_i(A_i) >= v_i(A_j).
CheckResult is_eref(const Instance& inst, const Allocation& alloc);

/// Every nonzero valuation lies in [low, high].
struct ValueBand {
  Value low = 0;
  Value high = 0;
};

/// Smallest and largest nonzero valuation; nullopt if everything is zero.
std::optional<ValueBand> detect_band(const Instance& inst);

struct PartialErefReport {
  std::optional<ValueBand> band;
  std::vector<AgentPair> guaranteed;  // e_i < (low/high) e_j
  std::vector<AgentPair> violations;  // guaranteed pairs where i envies j
  bool decentralized = false;         // alloc is a decentralized solution
};

/// Pairs whose endowment gap is wide enough that the decentralized solution
/// keeps every good i values away from j, and the envy check on each.
PartialErefReport eref_partial_0lh(const Instance& inst, const Allocation& alloc,
                                   std::optional<ValueBand> band = std::nullopt);

struct FairnessReport {
  CheckResult ef1;
  CheckResult eref;
  PartialErefReport partial;
};

FairnessReport fairness_report(const Instance& inst, const Allocation& alloc);

/// Valuations v_k(g) ~ U[0, upper[g]] independently for every agent k.
struct MCConfig {
  std::vector<Value> endowments;
  std::vector<double> upper;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;

  int agents() const { return int(endowments.size()); }
  int goods() const { return int(upper.size()); }
};

enum class Verdict { Holds, Inconclusive, Violated };

const char* to_string(Verdict v);

/// Verdict for "quantity >= threshold" given a 99% normal interval.
Verdict judge(const MeanEstimate& est, double threshold);

struct ExpectationReport {
  Agent i = 0, j = 0;
  MeanEstimate own;           // v_i(A_i)
  MeanEstimate other;         // v_i(A_j)
  MeanEstimate diff;          // v_i(A_i) - v_i(A_j), paired
  MeanEstimate scaled_diff;   // v_i(A_i) - (e_j/e_i) v_i(A_j), paired
  Verdict basic = Verdict::Inconclusive;
  Verdict strengthened = Verdict::Inconclusive;
};

/// Requires e_i <= e_j.
ExpectationReport mc_eref_expectation(const MCConfig& cfg, Agent i, Agent j);

struct ProbabilityReport {
  Agent i = 0, j = 0;
  MeanEstimate empirical;  // Pr(v_i(A_i) >= v_i(A_j))
  Rational per_good;       // prod_k e_k / (n e_j^n)
  double bound = 0.0;      // max(0, 1 - per_good)^m
  Verdict verdict = Verdict::Inconclusive;
};

/// Requires e_i <= e_j.
ProbabilityReport mc_eref_probability(const MCConfig& cfg, Agent i, Agent j);

/// Closed-form lower bound on Pr(v_i(A_i) >= v_i(A_j)) under uniform draws.
Rational eref_probability_term(std::span<const Value> endowments, Agent j);
double eref_probability_bound(std::span<const Value> endowments, Agent j, int goods);

}  // namespace fairdiv
