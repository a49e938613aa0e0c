#include "fairdiv/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>

#include "fairdiv/welfare.hpp"

namespace fairdiv {

namespace {

Value to_value(const BigInt& x) {
  if (x > std::numeric_limits<Value>::max() || x < std::numeric_limits<Value>::min())
    throw InstanceError(InstanceErrc::invalid_parameter, "scaled value does not fit in 64 bits");
  return x.convert_to<Value>();
}

/// Exact integer image of a real quantity under `scale`; the caller picks
/// scale so that the product is integral.
Value scaled(const Rational& r, const BigInt& scale) {
  Rational s = r * Rational(scale);
  if (denominator_of(s) != 1)
    throw InstanceError(InstanceErrc::invalid_parameter, "scale does not clear denominator");
  return to_value(numerator_of(s));
}

std::string str(const Rational& r) { return r.str(); }

}  // namespace

std::vector<Value> random_composition(Value total, int parts, Rng& rng) {
  if (parts < 1) throw InstanceError(InstanceErrc::invalid_parameter, "composition needs at least one part");
  if (total < 0) throw InstanceError(InstanceErrc::invalid_parameter, "composition total must be non-negative");
  // Uniform (parts-1)-subset of {1, ..., total+parts-1}, as sorted bar positions.
  std::vector<Value> bars(static_cast<std::size_t>(parts - 1));
  std::ranges::sample(std::views::iota(Value{1}, total + parts), bars.begin(), parts - 1, rng);
  std::ranges::sort(bars);
  std::vector<Value> out;
  out.reserve(static_cast<std::size_t>(parts));
  Value prev = 0;
  for (Value b : bars) {
    out.push_back(b - prev - 1);
    prev = b;
  }
  out.push_back(total + parts - prev - 1);
  return out;
}

Instance generate_random(const GenConfig& cfg) {
  if (cfg.n < 1 || cfg.m < 1) throw InstanceError(InstanceErrc::invalid_parameter, "n and m must be positive");
  if (cfg.e_max < 1) throw InstanceError(InstanceErrc::invalid_parameter, "e_max must be at least 1");
  if (cfg.total_valuation < 0)
    throw InstanceError(InstanceErrc::invalid_parameter, "total valuation must be non-negative");

  Rng rng(cfg.seed);
  ValueVector e(cfg.n);
  std::uniform_int_distribution<Value> endow(1, cfg.e_max);
  for (Agent i = 0; i < cfg.n; ++i) e(i) = endow(rng);

  ValueMatrix v(cfg.n, cfg.m);
  for (Agent i = 0; i < cfg.n; ++i) {
    const auto row = random_composition(cfg.total_valuation, cfg.m, rng);
    for (Good g = 0; g < cfg.m; ++g) v(i, g) = row[static_cast<std::size_t>(g)];
  }

  Metadata meta;
  meta.family = "random";
  meta.params = {{"e_max", std::to_string(cfg.e_max)},
                 {"seed", std::to_string(cfg.seed)},
                 {"total_valuation", std::to_string(cfg.total_valuation)}};
  return Instance(std::move(v), std::move(e), std::move(meta));
}

Instance generate_example1(int n, const Rational& eps) {
  if (n < 2) throw InstanceError(InstanceErrc::invalid_parameter, "example1 needs n >= 2");
  if (eps <= 0) throw InstanceError(InstanceErrc::invalid_parameter, "example1 needs eps > 0");
  const BigInt scale = denominator_of(eps);
  ValueMatrix v = ValueMatrix::Constant(n, n, scaled(1, scale));
  ValueVector e = ValueVector::Constant(n, scaled(1 + eps, scale));
  e(0) = scaled(1, scale);
  Metadata meta{to_value(scale), "example1", {{"eps", str(eps)}, {"n", std::to_string(n)}}};
  return Instance(std::move(v), std::move(e), std::move(meta));
}

Instance generate_example2(const Rational& x, const Rational& eps) {
  if (!(eps > 0) || !(x > eps))
    throw InstanceError(InstanceErrc::invalid_parameter, "example2 needs x > eps > 0");
  const BigInt scale = lcm(denominator_of(x), denominator_of(eps));
  ValueMatrix v(2, 2);
  v << scaled(eps, scale), 0, scaled(x, scale), scaled(eps, scale);
  ValueVector e(2);
  e << scaled(2, scale), scaled(1, scale);
  Metadata meta{to_value(scale), "example2", {{"eps", str(eps)}, {"x", str(x)}}};
  return Instance(std::move(v), std::move(e), std::move(meta));
}

namespace {

const Rational kChainEps(1, 1000);

}  // namespace

double chain_family_threshold(const Rational& x) {
  if (!(x > 0)) throw InstanceError(InstanceErrc::invalid_parameter, "chain family needs x > 0");
  const double xd = to_double(x);
  const double inv = to_double(1 / x);
  const double eps = to_double(kChainEps);
  const double z = approx_factor(xd);
  const double gap = std::log(inv + 1 - eps) - z * std::log(inv + eps);
  if (!(gap > 0)) return std::numeric_limits<double>::infinity();
  return (std::log(inv + 1 - eps) - std::log(inv)) / gap;
}

Instance generate_chain_family(int n, const Rational& x) {
  if (x < parse_rational("0.194"))
    throw InstanceError(InstanceErrc::invalid_parameter, "chain family needs x >= 0.194");
  const double threshold = chain_family_threshold(x);
  if (n < 2 || !(static_cast<double>(n) > threshold))
    throw InstanceError(InstanceErrc::invalid_parameter,
                        "chain family needs n > " + std::to_string(threshold) + " for x = " + str(x));
  const Rational inv = 1 / x;
  const BigInt scale = lcm(denominator_of(kChainEps), denominator_of(inv));
  ValueMatrix v = ValueMatrix::Zero(n, n);
  for (Agent i = 0; i < n; ++i) {
    v(i, i) = scaled(kChainEps, scale);
    if (i > 0) v(i, i - 1) = scaled(1 - kChainEps, scale);
  }
  ValueVector e = ValueVector::Constant(n, scaled(inv, scale));
  Metadata meta{to_value(scale), "chain", {{"eps", str(kChainEps)}, {"n", std::to_string(n)}, {"x", str(x)}}};
  return Instance(std::move(v), std::move(e), std::move(meta));
}

Instance generate_breakdown_instance(int n, int m, const Rational& eps) {
  if (n < 2 || m < n) throw InstanceError(InstanceErrc::invalid_parameter, "breakdown instance needs m >= n >= 2");
  if (!(eps > 0)) throw InstanceError(InstanceErrc::invalid_parameter, "breakdown instance needs eps > 0");
  const BigInt scale = denominator_of(eps);
  const Value unit = scaled(eps, scale);
  ValueMatrix v = ValueMatrix::Constant(n, m, unit);
  ValueVector e = ValueVector::Constant(n, unit);

  // Agent 0 receives, agent n-1 is the over-endowed one.
  const Agent i = 0, j = n - 1;
  const BigInt vi = BigInt(unit) * m, vj = BigInt(unit) * m;
  const BigInt product = (vj - BigInt(m - 1) * unit) * (vi - unit + e(i));
  e(j) = to_value(product / unit + 1);

  Metadata meta{to_value(scale), "breakdown",
                {{"eps", str(eps)}, {"m", std::to_string(m)}, {"n", std::to_string(n)}}};
  return Instance(std::move(v), std::move(e), std::move(meta));
}

Allocation random_allocation(int agents, int goods, Rng& rng) {
  std::vector<Agent> owner(static_cast<std::size_t>(goods));
  for (auto& o : owner) o = uniform_index(rng, agents);
  return Allocation(std::move(owner), agents);
}

}  // namespace fairdiv
