#include "fairdiv/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairdiv {

namespace {

double log2_real(Value scaled, std::int64_t scale) {
  return std::log2(static_cast<double>(scaled)) - std::log2(static_cast<double>(scale));
}

}  // namespace

double nash_welfare(const Instance& inst, const Allocation& alloc) {
  const ValueVector own = own_values(inst, alloc);
  double sum = 0.0;
  for (Agent i = 0; i < inst.agents(); ++i) sum += log2_real(own(i) + inst.endowment(i), inst.scale());
  return sum;
}

double baseline_nash(const Instance& inst) {
  double sum = 0.0;
  for (Agent i = 0; i < inst.agents(); ++i) sum += log2_real(inst.endowment(i), inst.scale());
  return sum;
}

bool endowment_log_sum_nonnegative(const Instance& inst) {
  BigInt product = 1, scale_power = 1;
  for (Agent i = 0; i < inst.agents(); ++i) {
    product *= inst.endowment(i);
    scale_power *= inst.scale();
  }
  return product >= scale_power;
}

CentralScore central_objective(const Instance& inst, const Allocation& alloc) {
  const ValueVector own = own_values(inst, alloc);
  CentralScore score;
  for (Agent i = 0; i < inst.agents(); ++i) {
    if (own(i) > 0) {
      ++score.count;
      score.sum_log += log2_real(own(i), inst.scale());
    }
  }
  return score;
}

double utilitarian(const Instance& inst, const Allocation& alloc) {
  return static_cast<double>(own_values(inst, alloc).sum()) / static_cast<double>(inst.scale());
}

double egalitarian(const Instance& inst, const Allocation& alloc) {
  const ValueVector totals = own_values(inst, alloc) + inst.endowments();
  return static_cast<double>(totals.minCoeff()) / static_cast<double>(inst.scale());
}

double marginal_utility(const Instance& inst, Agent i, Good g) {
  const double e = static_cast<double>(inst.endowment(i));
  return std::log2(static_cast<double>(inst.value(i, g)) + e) - std::log2(e);
}

double bundle_utility(const Instance& inst, Agent i, std::span<const Good> bundle) {
  double sum = 0.0;
  for (Good g : bundle) sum += marginal_utility(inst, i, g);
  return sum;
}

double bundle_utility_star(const Instance& inst, Agent i, std::span<const Good> bundle) {
  Value v = 0;
  for (Good g : bundle) v += inst.value(i, g);
  const double e = static_cast<double>(inst.endowment(i));
  return std::log2(static_cast<double>(v) + e) - std::log2(e);
}

double approx_factor(double x) {
  if (!(x > 0.0)) throw std::domain_error("approx_factor needs x > 0");
  return (x + x * x * x / 3.0) / std::log1p(x);
}

Rational max_value_ratio(const Instance& inst) {
  const ValueVector totals = inst.totals();
  Rational best = 0;
  for (Agent i = 0; i < inst.agents(); ++i) best = std::max(best, Rational(totals(i), inst.endowment(i)));
  return best;
}

double z_of(const Instance& inst) {
  const Rational ratio = max_value_ratio(inst);
  return ratio == 0 ? 1.0 : approx_factor(to_double(ratio));
}

Rational alpha_of(const Instance& inst) {
  std::optional<Rational> best;
  for (Agent i = 0; i < inst.agents(); ++i)
    for (Good g = 0; g < inst.goods(); ++g)
      if (inst.value(i, g) > 0) {
        Rational r(inst.endowment(i), inst.value(i, g));
        if (!best || r > *best) best = r;
      }
  if (!best) throw std::domain_error("alpha is undefined when every valuation is zero");
  return *best;
}

double relative_error_bound(double c) {
  if (!(c > 0.0)) throw std::domain_error("relative_error_bound needs C > 0");
  return approx_factor(c) - 1.0;
}

double marginal_ratio(const Instance& inst, const Allocation& alloc, const Allocation& opt) {
  if ((own_values(inst, opt).array() == 0).all())
    throw UndefinedRatio("reference allocation adds no welfare over the endowments");
  const double base = baseline_nash(inst);
  return (nash_welfare(inst, alloc) - base) / (nash_welfare(inst, opt) - base);
}

WelfareReport welfare_report(const Instance& inst, const Allocation& alloc, const Allocation* opt) {
  WelfareReport r;
  r.nash = nash_welfare(inst, alloc);
  r.utilitarian = utilitarian(inst, alloc);
  r.egalitarian = egalitarian(inst, alloc);
  r.baseline_nash = baseline_nash(inst);
  if (opt) {
    try {
      r.marginal_ratio = marginal_ratio(inst, alloc, *opt);
    } catch (const UndefinedRatio&) {
    }
  }
  return r;
}

DecentralizedBoundCheck check_decentralized_bound(const Instance& inst, const Allocation& dec,
                                                  const Allocation& opt) {
  DecentralizedBoundCheck c;
  c.precondition = endowment_log_sum_nonnegative(inst);
  c.z = z_of(inst);
  c.lhs = c.z * nash_welfare(inst, dec);
  c.rhs = nash_welfare(inst, opt);
  c.conclusion = c.lhs >= c.rhs - kLogSlack;
  return c;
}

CentralizedBoundCheck check_centralized_bound(const Instance& inst, const Allocation& cen,
                                              const Allocation& opt) {
  CentralizedBoundCheck c;
  auto serves_all = [](const Allocation& a) {
    const auto sizes = a.bundle_sizes();
    return std::all_of(sizes.begin(), sizes.end(), [](int s) { return s > 0; });
  };
  c.every_agent_served = serves_all(cen) && serves_all(opt);
  c.every_good_wanted = (inst.valuations().colwise().maxCoeff().array() > 0).all();
  c.precondition = c.every_agent_served && c.every_good_wanted;
  c.lhs = nash_welfare(inst, cen);
  if ((inst.valuations().array() > 0).any()) {
    c.alpha = to_double(alpha_of(inst));
    c.rhs = nash_welfare(inst, opt) - inst.agents() * std::log2(1.0 + *c.alpha);
    c.conclusion = c.lhs > c.rhs - kLogSlack;
  } else {
    c.rhs = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

}  // namespace fairdiv
