#include "fairdiv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "fairdiv/generators.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

std::string_view to_string(Objective obj) {
  return obj == Objective::WithEndowments ? "opt" : "cen";
}

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::Oracle: return "oracle";
    case Engine::BranchBound: return "bnb";
    case Engine::LocalSearch: return "ls";
  }
  return "?";
}

Objective parse_objective(std::string_view text) {
  if (text == "opt") return Objective::WithEndowments;
  if (text == "cen") return Objective::GoodsOnly;
  throw std::invalid_argument("unknown objective '" + std::string(text) + "' (expected opt or cen)");
}

Engine parse_engine(std::string_view text) {
  if (text == "oracle") return Engine::Oracle;
  if (text == "bnb") return Engine::BranchBound;
  if (text == "ls") return Engine::LocalSearch;
  throw std::invalid_argument("unknown engine '" + std::string(text) + "' (expected oracle, bnb or ls)");
}

bool strictly_better(const Score& a, const Score& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.sum_log > b.sum_log + kScoreTieTolerance;
}

namespace {

Score operator+(const Score& a, const Score& b) { return {a.count + b.count, a.sum_log + b.sum_log}; }
Score operator-(const Score& a, const Score& b) { return {a.count - b.count, a.sum_log - b.sum_log}; }

/// Per-agent contribution to the objective, in scaled units.
class Terms {
 public:
  Terms(const Instance& inst, Objective obj) : inst_(inst), obj_(obj), log_scale_(std::log2(double(inst.scale()))) {}

  Score term(Agent i, Value bundle) const {
    if (obj_ == Objective::WithEndowments) return {1, std::log2(double(bundle + inst_.endowment(i)))};
    if (bundle > 0) return {1, std::log2(double(bundle))};
    return {0, 0.0};
  }

  Score total(std::span<const Value> bundles) const {
    Score s;
    for (Agent i = 0; i < inst_.agents(); ++i) s = s + term(i, bundles[std::size_t(i)]);
    return s;
  }

  /// Scaled score to real units.
  Score real(const Score& s) const { return {s.count, s.sum_log - s.count * log_scale_}; }

 private:
  const Instance& inst_;
  Objective obj_;
  double log_scale_;
};

std::vector<Value> bundle_values(const Instance& inst, std::span<const Agent> owner) {
  std::vector<Value> b(std::size_t(inst.agents()), 0);
  for (Good g = 0; g < inst.goods(); ++g) b[std::size_t(owner[std::size_t(g)])] += inst.value(owner[std::size_t(g)], g);
  return b;
}

}  // namespace

Score score_of(const Instance& inst, const Allocation& alloc, Objective obj) {
  require_compatible(inst, alloc);
  Terms terms(inst, obj);
  return terms.real(terms.total(bundle_values(inst, alloc.owners())));
}

std::optional<std::uint64_t> allocation_count(int agents, int goods, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int g = 0; g < goods; ++g) {
    if (total > cap / std::uint64_t(agents)) return std::nullopt;
    total *= std::uint64_t(agents);
  }
  if (total > cap) return std::nullopt;
  return total;
}

SolveResult solve_oracle(const Instance& inst, Objective obj, std::uint64_t cap) {
  const int n = inst.agents(), m = inst.goods();
  if (!allocation_count(n, m, cap))
    throw SolverError("oracle: " + std::to_string(n) + "^" + std::to_string(m) + " allocations exceed the cap");
  Terms terms(inst, obj);
  std::vector<Agent> owner(std::size_t(m), 0);
  std::vector<Value> b = bundle_values(inst, owner);
  Score best = terms.total(b);
  std::vector<Agent> best_owner = owner;
  std::int64_t visited = 1;

  for (;;) {
    int pos = m - 1;
    while (pos >= 0 && owner[std::size_t(pos)] == n - 1) {
      b[std::size_t(n - 1)] -= inst.value(n - 1, pos);
      b[0] += inst.value(0, pos);
      owner[std::size_t(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    const Agent from = owner[std::size_t(pos)];
    b[std::size_t(from)] -= inst.value(from, pos);
    b[std::size_t(from + 1)] += inst.value(from + 1, pos);
    owner[std::size_t(pos)] = from + 1;
    ++visited;
    const Score s = terms.total(b);
    if (strictly_better(s, best)) {
      best = s;
      best_owner = owner;
    }
  }
  return {Allocation(std::move(best_owner), n), terms.real(best), Engine::Oracle, true, visited, std::nullopt};
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Instance& inst, Objective obj, std::chrono::milliseconds timeout)
      : inst_(inst), obj_(obj), terms_(inst, obj), n_(inst.agents()), m_(inst.goods()) {
    if (timeout.count() > 0) deadline_ = std::chrono::steady_clock::now() + timeout;

    order_.resize(std::size_t(m_));
    std::iota(order_.begin(), order_.end(), 0);
    const auto col_max = inst.valuations().colwise().maxCoeff();
    std::stable_sort(order_.begin(), order_.end(), [&](Good a, Good b) { return col_max(a) > col_max(b); });

    // A good held by someone who values it at zero can always be handed to a
    // positive valuer for a strict gain, so only positive valuers are branched on.
    candidates_.resize(std::size_t(m_));
    for (Good g = 0; g < m_; ++g) {
      for (Agent i = 0; i < n_; ++i)
        if (inst.value(i, g) > 0) candidates_[std::size_t(g)].push_back(i);
      if (candidates_[std::size_t(g)].empty()) candidates_[std::size_t(g)].push_back(0);
    }

    SolveResult seed = solve_local_search(inst, obj, 4, 0x5eedULL);
    best_owner_.assign(seed.allocation.owners().begin(), seed.allocation.owners().end());
    best_ = terms_.total(bundle_values(inst, best_owner_));
    owner_.assign(std::size_t(m_), 0);
    b_.assign(std::size_t(n_), 0);
  }

  SolveResult run() {
    dfs(0);
    return {Allocation(best_owner_, n_), terms_.real(best_), Engine::BranchBound, !timed_out_, nodes_, std::nullopt};
  }

 private:
  void dfs(int depth) {
    ++nodes_;
    if (deadline_ && (nodes_ & 1023) == 0 && std::chrono::steady_clock::now() > *deadline_) timed_out_ = true;
    if (timed_out_) return;
    if (depth == m_) {
      const Score s = terms_.total(b_);
      if (strictly_better(s, best_)) {
        best_ = s;
        best_owner_ = owner_;
      }
      return;
    }
    if (!strictly_better(upper_bound(depth), best_)) return;
    const Good g = order_[std::size_t(depth)];
    for (Agent a : candidates_[std::size_t(g)]) {
      b_[std::size_t(a)] += inst_.value(a, g);
      owner_[std::size_t(g)] = a;
      dfs(depth + 1);
      b_[std::size_t(a)] -= inst_.value(a, g);
      if (timed_out_) return;
    }
  }

  // Marginal log gains only shrink as bundles grow, so the gain of each
  // remaining good measured against the current partial bundles bounds its
  // contribution to any completion.
  Score upper_bound(int depth) const {
    if (obj_ == Objective::WithEndowments) {
      double cur = 0.0;
      for (Agent i = 0; i < n_; ++i) cur += std::log2(double(b_[std::size_t(i)] + inst_.endowment(i)));
      for (int d = depth; d < m_; ++d) {
        const Good g = order_[std::size_t(d)];
        double best_gain = 0.0;
        for (Agent i : candidates_[std::size_t(g)]) {
          const double base = double(b_[std::size_t(i)] + inst_.endowment(i));
          best_gain = std::max(best_gain, std::log2(base + double(inst_.value(i, g))) - std::log2(base));
        }
        cur += best_gain;
      }
      return {n_, cur};
    }

    // Endowment-blind objective: agents still at zero can at best collect
    // every remaining good they value; positive agents gain at most the
    // per-good marginal gains.
    Score ub;
    std::vector<double> newcomer_logs;
    const int remaining = m_ - depth;
    for (Agent i = 0; i < n_; ++i) {
      const Value bi = b_[std::size_t(i)];
      if (bi > 0) {
        ++ub.count;
        ub.sum_log += std::log2(double(bi));
        continue;
      }
      Value reach = 0;
      for (int d = depth; d < m_; ++d) reach += inst_.value(i, order_[std::size_t(d)]);
      if (reach > 0) newcomer_logs.push_back(std::log2(double(reach)));
    }
    for (int d = depth; d < m_; ++d) {
      const Good g = order_[std::size_t(d)];
      double best_gain = 0.0;
      for (Agent i : candidates_[std::size_t(g)]) {
        const Value bi = b_[std::size_t(i)];
        if (bi > 0)
          best_gain = std::max(best_gain, std::log2(double(bi + inst_.value(i, g))) - std::log2(double(bi)));
      }
      ub.sum_log += best_gain;
    }
    const int k = std::min<int>(int(newcomer_logs.size()), remaining);
    std::partial_sort(newcomer_logs.begin(), newcomer_logs.begin() + k, newcomer_logs.end(), std::greater<>());
    for (int t = 0; t < k; ++t) ub.sum_log += newcomer_logs[std::size_t(t)];
    ub.count += k;
    return ub;
  }

  const Instance& inst_;
  Objective obj_;
  Terms terms_;
  int n_, m_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::vector<Good> order_;
  std::vector<std::vector<Agent>> candidates_;
  std::vector<Agent> owner_, best_owner_;
  std::vector<Value> b_;
  Score best_;
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

SolveResult solve_branch_bound(const Instance& inst, Objective obj, std::chrono::milliseconds timeout) {
  return BranchAndBound(inst, obj, timeout).run();
}

SolveResult solve_local_search(const Instance& inst, Objective obj, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw SolverError("local search needs at least one restart");
  const int n = inst.agents(), m = inst.goods();
  Terms terms(inst, obj);
  std::optional<Score> best;
  std::vector<Agent> best_owner;
  std::int64_t moves = 0;

  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, {std::uint64_t(r)}));
    const Allocation start = random_allocation(n, m, rng);
    std::vector<Agent> owner(start.owners().begin(), start.owners().end());
    std::vector<Value> b = bundle_values(inst, owner);
    std::vector<Score> cur(static_cast<std::size_t>(n));
    for (Agent i = 0; i < n; ++i) cur[std::size_t(i)] = terms.term(i, b[std::size_t(i)]);

    for (;;) {
      Score best_delta{0, 0.0};
      int kind = 0;  // 0 none, 1 move, 2 swap
      Good mg = -1, mh = -1;
      Agent mt = -1;

      for (Good g = 0; g < m; ++g) {
        const Agent a = owner[std::size_t(g)];
        const Score lose = terms.term(a, b[std::size_t(a)] - inst.value(a, g)) - cur[std::size_t(a)];
        for (Agent t = 0; t < n; ++t) {
          if (t == a) continue;
          const Score delta = lose + (terms.term(t, b[std::size_t(t)] + inst.value(t, g)) - cur[std::size_t(t)]);
          if (strictly_better(delta, best_delta)) {
            best_delta = delta;
            kind = 1;
            mg = g;
            mt = t;
          }
        }
      }
      for (Good g = 0; g < m; ++g) {
        const Agent a = owner[std::size_t(g)];
        for (Good h = g + 1; h < m; ++h) {
          const Agent c = owner[std::size_t(h)];
          if (c == a) continue;
          const Value ba = b[std::size_t(a)] - inst.value(a, g) + inst.value(a, h);
          const Value bc = b[std::size_t(c)] - inst.value(c, h) + inst.value(c, g);
          const Score delta = (terms.term(a, ba) - cur[std::size_t(a)]) + (terms.term(c, bc) - cur[std::size_t(c)]);
          if (strictly_better(delta, best_delta)) {
            best_delta = delta;
            kind = 2;
            mg = g;
            mh = h;
          }
        }
      }
      if (kind == 0) break;
      ++moves;
      auto give = [&](Good g, Agent to) {
        const Agent from = owner[std::size_t(g)];
        b[std::size_t(from)] -= inst.value(from, g);
        b[std::size_t(to)] += inst.value(to, g);
        owner[std::size_t(g)] = to;
      };
      if (kind == 1) {
        const Agent from = owner[std::size_t(mg)];
        give(mg, mt);
        cur[std::size_t(from)] = terms.term(from, b[std::size_t(from)]);
        cur[std::size_t(mt)] = terms.term(mt, b[std::size_t(mt)]);
      } else {
        const Agent a = owner[std::size_t(mg)], c = owner[std::size_t(mh)];
        give(mg, c);
        give(mh, a);
        cur[std::size_t(a)] = terms.term(a, b[std::size_t(a)]);
        cur[std::size_t(c)] = terms.term(c, b[std::size_t(c)]);
      }
    }

    const Score s = terms.total(b);
    if (!best || strictly_better(s, *best)) {
      best = s;
      best_owner = owner;
    }
  }
  return {Allocation(std::move(best_owner), n), terms.real(*best), Engine::LocalSearch, false, moves, seed};
}

SolveResult solve(const Instance& inst, Objective obj, Engine engine, const SolveOptions& opts) {
  switch (engine) {
    case Engine::Oracle: return solve_oracle(inst, obj, opts.enumeration_cap);
    case Engine::BranchBound: return solve_branch_bound(inst, obj, opts.timeout);
    case Engine::LocalSearch: return solve_local_search(inst, obj, opts.restarts, opts.seed);
  }
  throw SolverError("unknown engine");
}

SolveResult solve_exact(const Instance& inst, Objective obj, const SolveOptions& opts) {
  if (allocation_count(inst.agents(), inst.goods(), opts.enumeration_cap))
    return solve_oracle(inst, obj, opts.enumeration_cap);
  return solve_branch_bound(inst, obj, opts.timeout);
}

namespace {

BigInt nash_product(const Instance& inst, const Allocation& alloc) {
  const ValueVector own = own_values(inst, alloc);
  BigInt p = 1;
  for (Agent i = 0; i < inst.agents(); ++i) p *= BigInt(own(i) + inst.endowment(i));
  return p;
}

}  // namespace

BreakdownReport breakdown_check(const Instance& inst, const SolveOptions& opts) {
  BreakdownReport r;
  const int n = inst.agents(), m = inst.goods();
  const Value eps = inst.valuations().minCoeff();
  if (m < n) {
    r.reason = "fewer goods than agents";
    return r;
  }
  if (eps <= 0) {
    r.reason = "some valuation is zero";
    return r;
  }
  r.precondition = true;
  const ValueVector totals = inst.totals();
  for (Agent i = 0; i < n && !r.condition; ++i) {
    for (Agent j = 0; j < n; ++j) {
      if (i == j) continue;
      const BigInt lhs = BigInt(eps) * inst.endowment(j);
      const BigInt rhs = (BigInt(totals(j)) - BigInt(m - 1) * eps) * (BigInt(totals(i)) - eps + inst.endowment(i));
      if (lhs > rhs) {
        r.condition = true;
        r.pair = std::pair{i, j};
        break;
      }
    }
  }
  if (r.condition) {
    const SolveResult cen = solve_exact(inst, Objective::GoodsOnly, opts);
    const SolveResult opt = solve_exact(inst, Objective::WithEndowments, opts);
    r.nw_central = nash_welfare(inst, cen.allocation);
    r.nw_optimal = nash_welfare(inst, opt.allocation);
    if (cen.exact && opt.exact) r.gap_confirmed = nash_product(inst, cen.allocation) < nash_product(inst, opt.allocation);
  }
  return r;
}

bool move_improves_nash(const Instance& inst, const Allocation& alloc, Good g, Agent i) {
  const Agent j = alloc.owner(g);
  if (i == j) return false;
  const ValueVector own = own_values(inst, alloc);
  const BigInt after = BigInt(own(i) + inst.value(i, g) + inst.endowment(i)) *
                       BigInt(own(j) - inst.value(j, g) + inst.endowment(j));
  const BigInt before = BigInt(own(i) + inst.endowment(i)) * BigInt(own(j) + inst.endowment(j));
  return after > before;
}

}  // namespace fairdiv
