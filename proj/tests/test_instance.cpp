#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <map>

#include "fairdiv/generators.hpp"
#include "fairdiv/io.hpp"
#include "fairdiv/welfare.hpp"
#include "oracles.hpp"

using namespace fairdiv;

namespace {

InstanceErrc error_code(auto&& fn) {
  try {
    fn();
  } catch (const InstanceError& e) {
    return e.code();
  }
  FAIL("expected InstanceError");
  return InstanceErrc::invalid_parameter;
}

ValueMatrix mat(std::initializer_list<std::initializer_list<Value>> rows) {
  ValueMatrix v(Eigen::Index(rows.size()), Eigen::Index(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index j = 0;
    for (Value x : r) v(i, j++) = x;
    ++i;
  }
  return v;
}

ValueVector vec(std::initializer_list<Value> xs) {
  ValueVector v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (Value x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("new_instance validates and rejects each violation with its own code") {
  const Instance two = new_instance(mat({{1, 0}, {80, 1}}), vec({20, 10}));
  CHECK(two.agents() == 2);
  CHECK(two.goods() == 2);
  CHECK(two.value(1, 0) == 80);

  const Instance tiny = new_instance(mat({{0}}), vec({1}));
  CHECK(tiny.agents() == 1);

  CHECK(error_code([] { new_instance(mat({{1, 1}}), vec({0, 1})); }) == InstanceErrc::dimension_mismatch);
  CHECK(error_code([] { new_instance(mat({{1}, {1}}), vec({0, 1})); }) == InstanceErrc::nonpositive_endowment);
  CHECK(error_code([] { new_instance(mat({{1}, {-1}}), vec({1, 1})); }) == InstanceErrc::negative_valuation);
  CHECK(error_code([] { new_instance(ValueMatrix(0, 0), ValueVector(0)); }) == InstanceErrc::dimension_mismatch);
}

TEST_CASE("allocation bundles and validation") {
  const Allocation a({1, 0, 1}, 2);
  CHECK(a.bundles() == std::vector<std::vector<Good>>{{1}, {0, 2}});
  CHECK(a.bundle_sizes() == std::vector<int>{1, 2});
  CHECK(a.assignment()(2, 1) == 1);
  CHECK_THROWS(Allocation({0, 2}, 2));
  CHECK(Allocation::all_to(1, 3, 2) == Allocation({1, 1}, 3));

  const Instance I = new_instance(mat({{1, 2, 3}, {4, 5, 6}}), vec({1, 1}));
  const ValueMatrix w = cross_values(I, a);
  CHECK(w(0, 0) == 2);
  CHECK(w(0, 1) == 4);
  CHECK(w(1, 1) == 10);
  CHECK_THROWS(require_compatible(I, Allocation({0, 0}, 2)));
}

TEST_CASE("generate_random: trivial, row sums, determinism") {
  const Instance one = generate_random({1, 1, 1, 500, 12345});
  CHECK(one.value(0, 0) == 500);
  CHECK(one.endowment(0) == 1);

  const Instance I = generate_random({2, 3, 5, 500, 42});
  for (Agent i = 0; i < 2; ++i) {
    CHECK(I.totals()(i) == 500);
    CHECK(I.endowment(i) >= 1);
    CHECK(I.endowment(i) <= 5);
  }
  CHECK(I == generate_random({2, 3, 5, 500, 42}));
  CHECK_FALSE(I == generate_random({2, 3, 5, 500, 43}));

  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance J = generate_random({4, 7, 100, 37, s});
    CHECK(J.valuations().minCoeff() >= 0);
    for (Agent i = 0; i < 4; ++i) CHECK(J.totals()(i) == 37);
  }
  CHECK_THROWS_AS(generate_random({1, 1, 0, 500, 0}), InstanceError);
}

TEST_CASE("random_composition is uniform over compositions of 3 into 2 parts") {
  // Brute-force enumeration gives 4 compositions, each with probability 1/4.
  Rng rng(2024);
  std::map<std::vector<Value>, int> counts;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) ++counts[random_composition(3, 2, rng)];
  REQUIRE(counts.size() == 4);
  double stat = 0.0;
  for (const auto& [c, k] : counts) {
    CHECK(c[0] + c[1] == 3);
    const double expected = draws / 4.0;
    stat += (k - expected) * (k - expected) / expected;
  }
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(3), stat));
  CHECK(p > 0.001);
}

TEST_CASE("example instances") {
  const Instance e1 = generate_example1(3, parse_rational("0.01"));
  CHECK(e1.scale() == 100);
  CHECK((e1.valuations().array() == 100).all());
  CHECK(e1.endowments() == vec({100, 101, 101}));
  CHECK_THROWS_AS(generate_example1(1, parse_rational("0.01")), InstanceError);

  const Instance e2 = generate_example2(8, parse_rational("0.1"));
  CHECK(e2.scale() == 10);
  CHECK(e2.valuations() == mat({{1, 0}, {80, 1}}));
  CHECK(e2.endowments() == vec({20, 10}));
  CHECK_THROWS_AS(generate_example2(parse_rational("0.1"), parse_rational("0.2")), InstanceError);
}

TEST_CASE("chain family") {
  for (const char* xs : {"0.25", "0.5", "1"}) {
    const Rational x = parse_rational(xs);
    const int n = int(std::floor(chain_family_threshold(x))) + 1;
    const Instance I = generate_chain_family(n, x);
    CHECK(max_value_ratio(I) == x);
    CHECK((I.valuations().array() != 0).count() == 2 * n - 1);
    CHECK_THROWS_AS(generate_chain_family(n - 1, x), InstanceError);
  }
  CHECK(chain_family_threshold(parse_rational("0.25")) == doctest::Approx(9.5).epsilon(0.05));
  CHECK_THROWS_AS(generate_chain_family(50, parse_rational("0.19")), InstanceError);
}

TEST_CASE("breakdown instance (2,2,1)") {
  const Instance I = generate_breakdown_instance(2, 2, 1);
  CHECK(I.valuations() == mat({{1, 1}, {1, 1}}));
  // eps * e_2 > (v_2(G) - eps)(v_1(G) - eps + e_1) = 1 * 2 = 2, one unit above gives 3.
  CHECK(I.endowments() == vec({1, 3}));
  CHECK_THROWS_AS(generate_breakdown_instance(3, 2, 1), InstanceError);
}

TEST_CASE("instance documents round-trip and reject bad input") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Instance I = generate_random({3, 5, 1000, 500, s});
    CHECK(parse_instance(serialize(I)) == I);
  }
  const Instance e2 = generate_example2(8, parse_rational("0.1"));
  CHECK(parse_instance(serialize(e2)) == e2);

  const std::string text = serialize(new_instance(mat({{1, 2}}), vec({3})));
  Json doc = Json::parse(text);
  doc["endowments"][0] = 0;
  CHECK(error_code([&] { parse_instance(doc.dump()); }) == InstanceErrc::nonpositive_endowment);
  CHECK(error_code([&] { parse_instance(text.substr(0, text.size() / 2)); }) == InstanceErrc::malformed_document);
  CHECK(error_code([] { parse_instance("{\"format\":\"other\"}"); }) == InstanceErrc::malformed_document);

  const AllocationFile af{Allocation({0, 1, 1}, 2), Json{{"engine", "oracle"}}};
  const AllocationFile back = parse_allocation(serialize(af));
  CHECK(back.allocation == af.allocation);
  CHECK(back.meta == af.meta);
}
