#pragma once

#include <cstdint>

#include "fairdiv/instance.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

struct GenConfig {
  int n = 1;
  int m = 1;
  Value e_max = 1;
  Value total_valuation = 500;
  std::uint64_t seed = 0;
};

/// Uniform random composition of `total` into `parts` non-negative integers
/// (stars and bars: a uniform (parts-1)-subset of {1, ..., total+parts-1}).
std::vector<Value> random_composition(Value total, int parts, Rng& rng);

/// Endowments i.i.d. uniform on {1, ..., e_max}; then each agent's valuation
/// row is an independent uniform composition of total_valuation into m parts.
Instance generate_random(const GenConfig& cfg);

/// n agents, n goods all valued 1, endowments (1, 1+eps, ..., 1+eps).
Instance generate_example1(int n, const Rational& eps);

/// Two agents, two goods: e = (2, 1), v_1 = (eps, 0), v_2 = (x, eps).
Instance generate_example2(const Rational& x, const Rational& eps);

/// Smallest x for which the shifted-chain family separates the centralized
/// solution from the decentralized guarantee.
inline constexpr double kChainFamilyMinX = 0.194;

/// Value n must strictly exceed for the chain family at ratio x (eps = 0.001).
double chain_family_threshold(const Rational& x);

/// n agents, n goods; e_i = 1/x, v_i(g_i) = eps, v_i(g_{i-1}) = 1 - eps, eps = 0.001.
Instance generate_chain_family(int n, const Rational& x);

/// Every valuation equals eps; agent n-1's endowment is pushed just past the
/// level at which moving any of its goods to agent 0 always raises Nash welfare.
Instance generate_breakdown_instance(int n, int m, const Rational& eps);

Allocation random_allocation(int agents, int goods, Rng& rng);

}  // namespace fairdiv
