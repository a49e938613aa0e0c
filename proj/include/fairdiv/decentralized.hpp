#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fairdiv/instance.hpp"

namespace fairdiv {

/// Compares v_a(g)/e_a with v_b(g)/e_b exactly; returns -1, 0 or 1.
int compare_ratio(const Instance& inst, Good g, Agent a, Agent b);

/// Agents among `pool` maximizing v_i(g)/e_i, ascending.
std::vector<Agent> ratio_argmax(const Instance& inst, Good g, std::span<const Agent> pool);
std::vector<Agent> ratio_argmax(const Instance& inst, Good g);

/// Agents maximizing the marginal log utility, clustered within `slack`.
std::vector<Agent> utility_argmax(const Instance& inst, Good g, double slack = 1e-12);

/// True iff both argmax sets of good g coincide.
bool argmax_equivalence_check(const Instance& inst, Good g);

/// Tie rule for the closed-form solution: lowest index, or uniform given a seed.
struct TieBreak {
  std::optional<std::uint64_t> seed;

  static TieBreak lowest_index() { return {}; }
  static TieBreak seeded(std::uint64_t s) { return {s}; }
};

/// Every good goes to an agent maximizing v_i(g)/e_i.
Allocation decentralized_solution(const Instance& inst, TieBreak tie = TieBreak::lowest_index());

/// True iff every good is held by some global maximizer of v_i(g)/e_i.
bool is_decentralized_solution(const Instance& inst, const Allocation& alloc);

struct RandomStart {};
struct CentralizedStart {};
using InitialAllocation = std::variant<RandomStart, CentralizedStart, Allocation>;

struct ExchangeConfig {
  int k = 2;
  int rounds = 0;
  std::uint64_t seed = 0;
  InitialAllocation initial = RandomStart{};
};

struct Move {
  Good good;
  Agent from;
  Agent to;

  friend bool operator==(const Move&, const Move&) = default;
};

struct RoundRecord {
  int round = 0;
  std::vector<Agent> subset;
  std::vector<Move> moves;
  std::uint64_t hash = 0;  // chained snapshot hash after the round
};

struct ExchangeTrace {
  int k = 0;
  std::uint64_t seed = 0;
  Allocation initial{std::vector<Agent>{}, 1};
  std::uint64_t initial_hash = 0;
  std::vector<RoundRecord> rounds;
  Allocation final_allocation{std::vector<Agent>{}, 1};
  bool converged = false;
};

std::uint64_t snapshot_hash(std::uint64_t previous, std::span<const Agent> owner);

/// Round t draws a uniform k-subset S; every good held by a member of S moves
/// to a member of S maximizing v_i(g)/e_i, ties broken uniformly at random.
/// Goods held outside S are untouched.
ExchangeTrace simulate(const Instance& inst, const ExchangeConfig& cfg);

struct ReplayResult {
  bool ok = false;
  std::string message;
};

/// Re-applies a trace and checks local feasibility, within-subset optimality
/// of every member's goods after each round, and the hash chain.
ReplayResult replay(const Instance& inst, const ExchangeTrace& trace);

/// Line-per-round JSON: a header line, one line per round, a final line.
std::string serialize_trace(const ExchangeTrace& trace);
ExchangeTrace parse_trace(const std::string& text);

/// 1 - m (1 - (k^2 - k)/(n^2 - n))^t, clamped below at 0.
double convergence_bound(int n, int m, int k, int t);

/// max(2, round(n/3)), capped at n.
int partial_subset_size(int n);

/// `rounds` exchange rounds from `start` with subsets of size k
/// (k = 0 picks partial_subset_size).
Allocation run_partial(const Instance& inst, const Allocation& start, std::uint64_t seed, int rounds = 3, int k = 0);

}  // namespace fairdiv
