#pragma once

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>

#include "fairdiv/instance.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

// All welfare quantities are reported in the instance's real units (stored
// integers divided by the scale factor) and in base-2 logarithms.

inline constexpr double kLogSlack = 1e-9;

double nash_welfare(const Instance& inst, const Allocation& alloc);

/// Nash welfare of handing out no goods: sum_i log2 e_i.
double baseline_nash(const Instance& inst);

/// Exact test of sum_i log2 e_i >= 0 in real units.
bool endowment_log_sum_nonnegative(const Instance& inst);

/// Endowment-blind objective. Agents with zero bundle value are excluded from
/// the log sum and counted instead; pairs order lexicographically.
struct CentralScore {
  int count = 0;
  double sum_log = 0.0;

  friend auto operator<=>(const CentralScore&, const CentralScore&) = default;
};

CentralScore central_objective(const Instance& inst, const Allocation& alloc);

double utilitarian(const Instance& inst, const Allocation& alloc);
double egalitarian(const Instance& inst, const Allocation& alloc);

/// log2(v_i(g) + e_i) - log2(e_i).
double marginal_utility(const Instance& inst, Agent i, Good g);

/// Sum of per-good marginal utilities over a bundle.
double bundle_utility(const Instance& inst, Agent i, std::span<const Good> bundle);

/// log2(v_i(B) + e_i) - log2(e_i).
double bundle_utility_star(const Instance& inst, Agent i, std::span<const Good> bundle);

/// (x + x^3/3) / ln(1 + x); throws std::domain_error for x <= 0.
double approx_factor(double x);

/// max_i v_i(G) / e_i, exact.
Rational max_value_ratio(const Instance& inst);

/// approx_factor(max_value_ratio); 1 when no agent values anything.
double z_of(const Instance& inst);

/// max over positive valuations of e_i / v_i(g), exact (real units).
/// Throws std::domain_error when every valuation is zero.
Rational alpha_of(const Instance& inst);

/// approx_factor(c) - 1: bound on (u - u*) / u* when v_i(A_i)/e_i = c.
double relative_error_bound(double c);

class UndefinedRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (NW(A) - NW(empty)) / (NW(A_opt) - NW(empty)).
double marginal_ratio(const Instance& inst, const Allocation& alloc, const Allocation& opt);

struct WelfareReport {
  double nash = 0.0;
  double utilitarian = 0.0;
  double egalitarian = 0.0;
  double baseline_nash = 0.0;
  std::optional<double> marginal_ratio;
};

WelfareReport welfare_report(const Instance& inst, const Allocation& alloc,
                             const Allocation* opt = nullptr);

/// Outcome of checking the decentralized guarantee z * NW(A_dec) >= NW(A_opt).
struct DecentralizedBoundCheck {
  bool precondition = false;  // sum_i log e_i >= 0
  bool conclusion = false;
  double z = 1.0;
  double lhs = 0.0;  // z * NW(A_dec)
  double rhs = 0.0;  // NW(A_opt)
};

DecentralizedBoundCheck check_decentralized_bound(const Instance& inst, const Allocation& dec,
                                                  const Allocation& opt);

/// Outcome of checking NW(A_cen) > NW(A_opt) - n log2(1 + alpha).
struct CentralizedBoundCheck {
  bool every_agent_served = false;  // both allocations give every agent a good
  bool every_good_wanted = false;   // every good has a positive valuer
  bool precondition = false;
  bool conclusion = false;
  std::optional<double> alpha;
  double lhs = 0.0;  // NW(A_cen)
  double rhs = 0.0;  // NW(A_opt) - n log2(1 + alpha)
};

CentralizedBoundCheck check_centralized_bound(const Instance& inst, const Allocation& cen,
                                              const Allocation& opt);

}  // namespace fairdiv
