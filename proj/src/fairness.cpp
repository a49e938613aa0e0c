#include "fairdiv/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairdiv/decentralized.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

CheckResult is_ef1(const Instance& inst, const Allocation& alloc) {
  const ValueMatrix w = cross_values(inst, alloc);
  const int n = inst.agents();
  ValueMatrix top = ValueMatrix::Zero(n, n);  // top(i, j) = max_{g in A_j} v_i(g)
  for (Good g = 0; g < inst.goods(); ++g)
    for (Agent i = 0; i < n; ++i) top(i, alloc.owner(g)) = std::max(top(i, alloc.owner(g)), inst.value(i, g));
  for (Agent i = 0; i < n; ++i)
    for (Agent j = 0; j < n; ++j)
      if (i != j && w(i, i) < w(i, j) - top(i, j)) return {false, AgentPair{i, j}};
  return {};
}

CheckResult is_eref(const Instance& inst, const Allocation& alloc) {
  const ValueMatrix w = cross_values(inst, alloc);
  for (Agent i = 0; i < inst.agents(); ++i)
    for (Agent j = 0; j < inst.agents(); ++j)
      if (inst.endowment(i) < inst.endowment(j) && w(i, i) < w(i, j)) return {false, AgentPair{i, j}};
  return {};
}

std::optional<ValueBand> detect_band(const Instance& inst) {
  std::optional<ValueBand> band;
  for (Value v : inst.valuations().reshaped()) {
    if (v <= 0) continue;
    if (!band) band = ValueBand{v, v};
    band->low = std::min(band->low, v);
    band->high = std::max(band->high, v);
  }
  return band;
}

PartialErefReport eref_partial_0lh(const Instance& inst, const Allocation& alloc, std::optional<ValueBand> band) {
  PartialErefReport r;
  r.band = band ? band : detect_band(inst);
  r.decentralized = is_decentralized_solution(inst, alloc);
  if (!r.band) return r;
  if (r.band->low <= 0 || r.band->high < r.band->low) throw std::invalid_argument("band needs 0 < low <= high");
  const ValueMatrix w = cross_values(inst, alloc);
  for (Agent i = 0; i < inst.agents(); ++i)
    for (Agent j = 0; j < inst.agents(); ++j) {
      // e_i < (low/high) e_j
      if (__int128(inst.endowment(i)) * r.band->high >= __int128(r.band->low) * inst.endowment(j)) continue;
      r.guaranteed.emplace_back(i, j);
      if (w(i, i) < w(i, j)) r.violations.emplace_back(i, j);
    }
  return r;
}

FairnessReport fairness_report(const Instance& inst, const Allocation& alloc) {
  return {is_ef1(inst, alloc), is_eref(inst, alloc), eref_partial_0lh(inst, alloc)};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

Verdict judge(const MeanEstimate& est, double threshold) {
  if (est.lower() >= threshold) return Verdict::Holds;
  if (est.upper() < threshold) return Verdict::Violated;
  return Verdict::Inconclusive;
}

namespace {

void validate(const MCConfig& cfg, Agent i, Agent j) {
  const int n = cfg.agents();
  if (n < 2) throw std::invalid_argument("Monte Carlo estimate needs at least two agents");
  if (cfg.goods() < 1) throw std::invalid_argument("Monte Carlo estimate needs at least one good");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  for (Value e : cfg.endowments)
    if (e <= 0) throw std::invalid_argument("endowments must be positive");
  for (double m : cfg.upper)
    if (!(m > 0.0)) throw std::invalid_argument("uniform upper bounds must be positive");
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw std::invalid_argument("agents must be distinct and in range");
  if (cfg.endowments[std::size_t(i)] > cfg.endowments[std::size_t(j)])
    throw std::invalid_argument("pair orientation: need e_i <= e_j");
}

/// One valuation draw and its decentralized allocation; returns (v_i(A_i), v_i(A_j)).
std::pair<double, double> draw_trial(const MCConfig& cfg, Agent i, Agent j, Rng& rng) {
  const int n = cfg.agents();
  std::vector<double> v(static_cast<std::size_t>(n));
  double own = 0.0, other = 0.0;
  std::vector<Agent> best;
  for (int g = 0; g < cfg.goods(); ++g) {
    std::uniform_real_distribution<double> dist(0.0, cfg.upper[std::size_t(g)]);
    for (auto& x : v) x = dist(rng);
    best.clear();
    double top = -1.0;
    for (Agent k = 0; k < n; ++k) {
      const double r = v[std::size_t(k)] / double(cfg.endowments[std::size_t(k)]);
      if (r > top) {
        top = r;
        best.assign(1, k);
      } else if (r == top) {
        best.push_back(k);
      }
    }
    const Agent winner = best.size() > 1 ? best[std::size_t(uniform_index(rng, int(best.size())))] : best.front();
    if (winner == i) own += v[std::size_t(i)];
    if (winner == j) other += v[std::size_t(i)];
  }
  return {own, other};
}

}  // namespace

ExpectationReport mc_eref_expectation(const MCConfig& cfg, Agent i, Agent j) {
  validate(cfg, i, j);
  const auto trials = std::size_t(cfg.trials);
  const double ratio = double(cfg.endowments[std::size_t(j)]) / double(cfg.endowments[std::size_t(i)]);
  std::vector<double> own(trials), other(trials), diff(trials), scaled(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(cfg.seed, {t}));
    const auto [x, y] = draw_trial(cfg, i, j, rng);
    own[t] = x;
    other[t] = y;
    diff[t] = x - y;
    scaled[t] = x - ratio * y;
  }
  ExpectationReport r;
  r.i = i;
  r.j = j;
  r.own = estimate_mean(own);
  r.other = estimate_mean(other);
  r.diff = estimate_mean(diff);
  r.scaled_diff = estimate_mean(scaled);
  r.basic = judge(r.diff, 0.0);
  r.strengthened = judge(r.scaled_diff, 0.0);
  return r;
}

Rational eref_probability_term(std::span<const Value> endowments, Agent j) {
  const int n = int(endowments.size());
  BigInt product = 1, ej_power = 1;
  for (Value e : endowments) {
    product *= e;
    ej_power *= endowments[std::size_t(j)];
  }
  return Rational(product, BigInt(n) * ej_power);
}

double eref_probability_bound(std::span<const Value> endowments, Agent j, int goods) {
  const Rational term = eref_probability_term(endowments, j);
  if (term >= 1) return 0.0;
  Rational base = 1 - term, acc = 1;
  for (int g = 0; g < goods; ++g) acc *= base;
  return to_double(acc);
}

ProbabilityReport mc_eref_probability(const MCConfig& cfg, Agent i, Agent j) {
  validate(cfg, i, j);
  const auto trials = std::size_t(cfg.trials);
  std::vector<double> hit(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(cfg.seed, {t}));
    const auto [x, y] = draw_trial(cfg, i, j, rng);
    hit[t] = x >= y ? 1.0 : 0.0;
  }
  ProbabilityReport r;
  r.i = i;
  r.j = j;
  r.empirical = estimate_mean(hit);
  r.per_good = eref_probability_term(cfg.endowments, j);
  r.bound = eref_probability_bound(cfg.endowments, j, cfg.goods());
  r.verdict = judge(r.empirical, r.bound);
  return r;
}

}  // namespace fairdiv
