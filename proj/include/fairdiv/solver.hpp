#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "fairdiv/instance.hpp"
#include "fairdiv/welfare.hpp"

namespace fairdiv {

/// WithEndowments maximizes Nash welfare sum_i log2(v_i(A_i) + e_i).
/// GoodsOnly maximizes the endowment-blind objective (count, sum log2 v_i(A_i)).
enum class Objective { WithEndowments, GoodsOnly };

enum class Engine { Oracle, BranchBound, LocalSearch };

std::string_view to_string(Objective obj);
std::string_view to_string(Engine engine);
Objective parse_objective(std::string_view text);
Engine parse_engine(std::string_view text);

/// Lexicographic (count, log_sum). For WithEndowments count is always n and
/// log_sum is the Nash welfare.
using Score = CentralScore;

/// Log-sum differences below this are treated as ties.
inline constexpr double kScoreTieTolerance = 1e-10;

/// True if `a` beats `b` by more than the tie tolerance.
bool strictly_better(const Score& a, const Score& b);

Score score_of(const Instance& inst, const Allocation& alloc, Objective obj);

struct SolveResult {
  Allocation allocation;
  Score score;
  Engine engine = Engine::Oracle;
  bool exact = false;
  std::int64_t work = 0;  // enumerated allocations, search nodes or improving moves
  std::optional<std::uint64_t> seed;
};

struct SolveOptions {
  std::uint64_t enumeration_cap = 20'000'000;
  std::chrono::milliseconds timeout{0};  // 0 disables the branch-and-bound deadline
  int restarts = 20;
  std::uint64_t seed = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration in lexicographic owner order; the first optimum wins.
SolveResult solve_oracle(const Instance& inst, Objective obj, std::uint64_t cap = 20'000'000);

/// Depth-first branch and bound with concavity bounds. On timeout returns the
/// incumbent with exact = false.
SolveResult solve_branch_bound(const Instance& inst, Objective obj,
                               std::chrono::milliseconds timeout = std::chrono::milliseconds{0});

/// Best-improvement local search over single-good moves and pairwise swaps
/// from `restarts` uniform random starts. Deterministic given seed.
SolveResult solve_local_search(const Instance& inst, Objective obj, int restarts, std::uint64_t seed);

SolveResult solve(const Instance& inst, Objective obj, Engine engine, const SolveOptions& opts = {});

/// Oracle when n^m fits the enumeration cap, branch and bound otherwise.
SolveResult solve_exact(const Instance& inst, Objective obj, const SolveOptions& opts = {});

/// n^m if it does not exceed cap, otherwise nullopt.
std::optional<std::uint64_t> allocation_count(int agents, int goods, std::uint64_t cap);

/// Sufficient condition under which the endowment-blind optimum cannot
/// maximize Nash welfare: with eps the smallest valuation, some pair (i, j)
/// has eps * e_j > (v_j(G) - (m-1) eps)(v_i(G) - eps + e_i).
struct BreakdownReport {
  bool precondition = false;
  std::string reason;
  bool condition = false;
  std::optional<std::pair<Agent, Agent>> pair;  // (receiver i, over-endowed j)
  std::optional<double> nw_central;
  std::optional<double> nw_optimal;
  std::optional<bool> gap_confirmed;  // NW(A_cen) < NW(A_opt)
};

BreakdownReport breakdown_check(const Instance& inst, const SolveOptions& opts = {});

/// Exact test of the move inequality for good g in allocation alloc:
/// moving g from its owner j to agent i strictly raises Nash welfare.
bool move_improves_nash(const Instance& inst, const Allocation& alloc, Good g, Agent i);

}  // namespace fairdiv
