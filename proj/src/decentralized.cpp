#include "fairdiv/decentralized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ranges>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairdiv/solver.hpp"
#include "fairdiv/generators.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/welfare.hpp"

namespace fairdiv {

int compare_ratio(const Instance& inst, Good g, Agent a, Agent b) {
  const __int128 lhs = __int128(inst.value(a, g)) * inst.endowment(b);
  const __int128 rhs = __int128(inst.value(b, g)) * inst.endowment(a);
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

std::vector<Agent> ratio_argmax(const Instance& inst, Good g, std::span<const Agent> pool) {
  std::vector<Agent> best;
  for (Agent i : pool) {
    if (best.empty()) {
      best.push_back(i);
      continue;
    }
    const int c = compare_ratio(inst, g, i, best.front());
    if (c > 0) best.assign(1, i);
    else if (c == 0) best.push_back(i);
  }
  std::ranges::sort(best);
  return best;
}

std::vector<Agent> ratio_argmax(const Instance& inst, Good g) {
  std::vector<Agent> all(std::size_t(inst.agents()));
  std::iota(all.begin(), all.end(), 0);
  return ratio_argmax(inst, g, all);
}

std::vector<Agent> utility_argmax(const Instance& inst, Good g, double slack) {
  std::vector<double> u(std::size_t(inst.agents()));
  for (Agent i = 0; i < inst.agents(); ++i) u[std::size_t(i)] = marginal_utility(inst, i, g);
  const double top = *std::ranges::max_element(u);
  std::vector<Agent> out;
  for (Agent i = 0; i < inst.agents(); ++i)
    if (u[std::size_t(i)] >= top - slack) out.push_back(i);
  return out;
}

bool argmax_equivalence_check(const Instance& inst, Good g) {
  return ratio_argmax(inst, g) == utility_argmax(inst, g);
}

Allocation decentralized_solution(const Instance& inst, TieBreak tie) {
  std::optional<Rng> rng;
  if (tie.seed) rng.emplace(*tie.seed);
  std::vector<Agent> owner(std::size_t(inst.goods()));
  for (Good g = 0; g < inst.goods(); ++g) {
    const auto best = ratio_argmax(inst, g);
    owner[std::size_t(g)] = rng && best.size() > 1 ? best[std::size_t(uniform_index(*rng, int(best.size())))]
                                                   : best.front();
  }
  return Allocation(std::move(owner), inst.agents());
}

bool is_decentralized_solution(const Instance& inst, const Allocation& alloc) {
  require_compatible(inst, alloc);
  for (Good g = 0; g < inst.goods(); ++g) {
    const Agent o = alloc.owner(g);
    for (Agent i = 0; i < inst.agents(); ++i)
      if (compare_ratio(inst, g, i, o) > 0) return false;
  }
  return true;
}

std::uint64_t snapshot_hash(std::uint64_t previous, std::span<const Agent> owner) {
  // FNV-1a over the owner vector, seeded with the previous link.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ previous;
  for (Agent a : owner) {
    auto x = static_cast<std::uint32_t>(a);
    for (int byte = 0; byte < 4; ++byte) {
      h ^= (x >> (8 * byte)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

Allocation resolve_start(const Instance& inst, const ExchangeConfig& cfg, Rng& rng) {
  return std::visit(
      [&](const auto& init) -> Allocation {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, RandomStart>) {
          return random_allocation(inst.agents(), inst.goods(), rng);
        } else if constexpr (std::is_same_v<T, CentralizedStart>) {
          if (allocation_count(inst.agents(), inst.goods(), 2'000'000))
            return solve_oracle(inst, Objective::GoodsOnly).allocation;
          return solve_local_search(inst, Objective::GoodsOnly, 20, cfg.seed).allocation;
        } else {
          require_compatible(inst, init);
          return init;
        }
      },
      cfg.initial);
}

}  // namespace

ExchangeTrace simulate(const Instance& inst, const ExchangeConfig& cfg) {
  const int n = inst.agents();
  if (cfg.k < 2 || cfg.k > n) throw std::invalid_argument("subset size k must lie in [2, n]");
  if (cfg.rounds < 0) throw std::invalid_argument("rounds must be non-negative");

  Rng rng(cfg.seed);
  ExchangeTrace trace;
  trace.k = cfg.k;
  trace.seed = cfg.seed;
  trace.initial = resolve_start(inst, cfg, rng);
  std::vector<Agent> owner(trace.initial.owners().begin(), trace.initial.owners().end());
  trace.initial_hash = snapshot_hash(0, owner);
  std::uint64_t hash = trace.initial_hash;

  std::vector<char> member(static_cast<std::size_t>(n));
  for (int t = 0; t < cfg.rounds; ++t) {
    RoundRecord rec;
    rec.round = t;
    rec.subset.resize(static_cast<std::size_t>(cfg.k));
    std::ranges::sample(std::views::iota(0, n), rec.subset.begin(), cfg.k, rng);
    std::ranges::sort(rec.subset);
    std::ranges::fill(member, 0);
    for (Agent a : rec.subset) member[std::size_t(a)] = 1;

    for (Good g = 0; g < inst.goods(); ++g) {
      const Agent from = owner[std::size_t(g)];
      if (!member[std::size_t(from)]) continue;
      const auto best = ratio_argmax(inst, g, rec.subset);
      const Agent to = best.size() > 1 ? best[std::size_t(uniform_index(rng, int(best.size())))] : best.front();
      if (to != from) {
        rec.moves.push_back({g, from, to});
        owner[std::size_t(g)] = to;
      }
    }
    hash = snapshot_hash(hash, owner);
    rec.hash = hash;
    trace.rounds.push_back(std::move(rec));
  }
  trace.final_allocation = Allocation(std::move(owner), n);
  trace.converged = is_decentralized_solution(inst, trace.final_allocation);
  return trace;
}

ReplayResult replay(const Instance& inst, const ExchangeTrace& trace) {
  auto fail = [](std::string msg) { return ReplayResult{false, std::move(msg)}; };
  try {
    require_compatible(inst, trace.initial);
    require_compatible(inst, trace.final_allocation);
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  std::vector<Agent> owner(trace.initial.owners().begin(), trace.initial.owners().end());
  std::uint64_t hash = snapshot_hash(0, owner);
  if (hash != trace.initial_hash) return fail("initial hash mismatch");

  std::vector<char> member(std::size_t(inst.agents()));
  for (const RoundRecord& rec : trace.rounds) {
    const std::string where = "round " + std::to_string(rec.round) + ": ";
    if (int(rec.subset.size()) != trace.k) return fail(where + "subset size differs from k");
    std::ranges::fill(member, 0);
    for (Agent a : rec.subset) {
      if (a < 0 || a >= inst.agents() || member[std::size_t(a)]) return fail(where + "invalid subset");
      member[std::size_t(a)] = 1;
    }
    for (const Move& mv : rec.moves) {
      if (mv.good < 0 || mv.good >= inst.goods()) return fail(where + "good out of range");
      if (owner[std::size_t(mv.good)] != mv.from) return fail(where + "move source is not the current owner");
      if (!member[std::size_t(mv.from)] || !member[std::size_t(mv.to)])
        return fail(where + "move leaves the subset");
      owner[std::size_t(mv.good)] = mv.to;
    }
    for (Good g = 0; g < inst.goods(); ++g) {
      const Agent o = owner[std::size_t(g)];
      if (!member[std::size_t(o)]) continue;
      for (Agent a : rec.subset)
        if (compare_ratio(inst, g, a, o) > 0) return fail(where + "good " + std::to_string(g) + " not at a local maximizer");
    }
    hash = snapshot_hash(hash, owner);
    if (hash != rec.hash) return fail(where + "hash mismatch");
  }
  if (!std::ranges::equal(owner, trace.final_allocation.owners())) return fail("final allocation mismatch");
  return {true, "ok"};
}

namespace {

using Json = nlohmann::ordered_json;

std::string hex(std::uint64_t h) {
  std::ostringstream ss;
  ss << "0x" << std::hex << h;
  return ss.str();
}

std::uint64_t unhex(const std::string& s) { return std::stoull(s, nullptr, 16); }

}  // namespace

std::string serialize_trace(const ExchangeTrace& trace) {
  std::ostringstream out;
  Json header{{"type", "header"},
              {"n", trace.initial.agents()},
              {"m", trace.initial.goods()},
              {"k", trace.k},
              {"rounds", trace.rounds.size()},
              {"seed", trace.seed},
              {"initial", std::vector<Agent>(trace.initial.owners().begin(), trace.initial.owners().end())},
              {"hash", hex(trace.initial_hash)}};
  out << header.dump() << '\n';
  for (const RoundRecord& rec : trace.rounds) {
    Json moves = Json::array();
    for (const Move& mv : rec.moves) moves.push_back({mv.good, mv.from, mv.to});
    Json line{{"type", "round"}, {"round", rec.round}, {"subset", rec.subset}, {"moves", moves}, {"hash", hex(rec.hash)}};
    out << line.dump() << '\n';
  }
  Json fin{{"type", "final"},
           {"owner", std::vector<Agent>(trace.final_allocation.owners().begin(), trace.final_allocation.owners().end())},
           {"converged", trace.converged}};
  out << fin.dump() << '\n';
  return out.str();
}

ExchangeTrace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ExchangeTrace trace;
  bool have_header = false, have_final = false;
  int n = 0;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json doc = Json::parse(line);
      const std::string type = doc.at("type").get<std::string>();
      if (type == "header") {
        n = doc.at("n").get<int>();
        trace.k = doc.at("k").get<int>();
        trace.seed = doc.at("seed").get<std::uint64_t>();
        trace.initial = Allocation(doc.at("initial").get<std::vector<Agent>>(), n);
        trace.initial_hash = unhex(doc.at("hash").get<std::string>());
        have_header = true;
      } else if (type == "round") {
        RoundRecord rec;
        rec.round = doc.at("round").get<int>();
        rec.subset = doc.at("subset").get<std::vector<Agent>>();
        for (const auto& mv : doc.at("moves")) rec.moves.push_back({mv.at(0).get<Good>(), mv.at(1).get<Agent>(), mv.at(2).get<Agent>()});
        rec.hash = unhex(doc.at("hash").get<std::string>());
        trace.rounds.push_back(std::move(rec));
      } else if (type == "final") {
        trace.final_allocation = Allocation(doc.at("owner").get<std::vector<Agent>>(), n);
        trace.converged = doc.at("converged").get<bool>();
        have_final = true;
      } else {
        throw std::invalid_argument("unknown line type '" + type + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace: ") + e.what());
  }
  if (!have_header || !have_final) throw std::invalid_argument("malformed trace: missing header or final line");
  return trace;
}

double convergence_bound(int n, int m, int k, int t) {
  if (n < 2 || k < 2 || k > n) throw std::invalid_argument("convergence bound needs 2 <= k <= n");
  if (m < 1 || t < 0) throw std::invalid_argument("convergence bound needs m >= 1 and t >= 0");
  const double p = double(k) * (k - 1) / (double(n) * (n - 1));
  return std::max(0.0, 1.0 - m * std::pow(1.0 - p, t));
}

int partial_subset_size(int n) {
  return std::min(n, std::max(2, int(std::lround(n / 3.0))));
}

Allocation run_partial(const Instance& inst, const Allocation& start, std::uint64_t seed, int rounds, int k) {
  require_compatible(inst, start);
  if (inst.agents() < 2) return start;
  ExchangeConfig cfg;
  cfg.k = k > 0 ? k : partial_subset_size(inst.agents());
  cfg.rounds = rounds;
  cfg.seed = seed;
  cfg.initial = start;
  return simulate(inst, cfg).final_allocation;
}

}  // namespace fairdiv
