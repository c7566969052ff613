#include <doctest.h>

#include "fixtures.hpp"
#include "walrus/oracles.hpp"
#include "walrus/valuation.hpp"

using namespace walrus;
using namespace walrus::fixtures;

TEST_CASE("value oracle evaluates each family and counts calls") {
  OracleCounter c;
  ValuationSpec add = ValuationSpec::make_additive({3, 5});
  CHECK(evaluate(add, subset({2}, 2), c) == 5);
  CHECK(c.value_calls == 1);

  ValuationSpec ud = ValuationSpec::make_unit_demand({1, 1});
  CHECK(evaluate(ud, subset({1, 2}, 2), c) == 1);

  ValuationSpec rank2 = ValuationSpec::make_uniform_matroid(2, {1, 1, 1});
  CHECK(evaluate(rank2, subset({1, 2, 3}, 3), c) == 2);

  ValuationSpec part = ValuationSpec::make_partition_matroid({{0, 1}, {2}}, {1, 1}, {4, 7, 2});
  CHECK(evaluate(part, subset({1, 2, 3}, 3), c) == 9);  // best of {4,7} plus 2
  CHECK(evaluate(part, subset({1, 2}, 3), c) == 7);
  CHECK(c.value_calls == 5);

  ValuationSpec table = ValuationSpec::make_subset_table({0, 1, 2, 7});
  CHECK(evaluate(table, subset({1, 2}, 2), c) == 7);
  CHECK(evaluate(table, subset({}, 2), c) == 0);
}

TEST_CASE("evaluate is referentially transparent") {
  ValuationSpec spec = ValuationSpec::make_uniform_matroid(2, {3, 1, 4});
  OracleCounter c;
  for (Mask s = 0; s < 8; ++s)
    CHECK(evaluate_mask(spec, s, 3, c) == evaluate_mask(spec, s, 3, c));
}

TEST_CASE("gross-substitutes check accepts the substitutes families") {
  CHECK(check_gross_substitutes(ValuationSpec::make_additive({3, 5}), 2).is_gs);
  CHECK(check_gross_substitutes(ValuationSpec::make_uniform_matroid(2, {1, 1, 1}), 3).is_gs);
  CHECK(check_gross_substitutes(ValuationSpec::make_unit_demand({4, 0, 9}), 3).is_gs);
  CHECK(check_gross_substitutes(
            ValuationSpec::make_partition_matroid({{0, 2}, {1, 3}}, {1, 2}, {5, 3, 2, 8}), 4)
            .is_gs);
}

TEST_CASE("gross-substitutes check rejects complements with a counterexample") {
  GsCheckResult r = check_gross_substitutes(complements_pair(), 2);
  REQUIRE_FALSE(r.is_gs);
  REQUIRE(r.violation.has_value());
  // Re-check the reported violation: no w satisfies the exchange inequality.
  OracleCounter c;
  auto omega = [&](Mask basis) {
    return evaluate_mask(complements_pair(), basis & 0b11u, 2, c);
  };
  Mask b1 = r.violation->basis_b, b2 = r.violation->basis_b2;
  int u = r.violation->element_u;
  REQUIRE(((b1 >> u) & 1u) == 1);
  REQUIRE(((b2 >> u) & 1u) == 0);
  Mask only2 = b2 & ~b1;
  for (int w = 0; w < 4; ++w) {
    if (!(only2 >> w & 1u)) continue;
    Mask b1s = (b1 & ~(Mask{1} << u)) | (Mask{1} << w);
    Mask b2s = (b2 & ~(Mask{1} << w)) | (Mask{1} << u);
    CHECK(omega(b1) + omega(b2) > omega(b1s) + omega(b2s));
  }
}

TEST_CASE("gross-substitutes check refuses oversized domains") {
  std::vector<std::int64_t> w(9, 1);
  CHECK_THROWS_AS(check_gross_substitutes(ValuationSpec::make_additive(w), 9), BudgetError);
}

TEST_CASE("generator is deterministic for a fixed seed") {
  MarketInstance one = generate_random_gs(GsFamily::additive, 2, 2, 5, 7);
  MarketInstance two = generate_random_gs(GsFamily::additive, 2, 2, 5, 7);
  REQUIRE(one.m() == two.m());
  for (int i = 0; i < one.m(); ++i) CHECK(one.buyers[i].weights == two.buyers[i].weights);
  MarketInstance other = generate_random_gs(GsFamily::additive, 2, 2, 5, 8);
  CHECK(one.buyers[0].weights != other.buyers[0].weights);
}

TEST_CASE("unit-demand generator keeps values in range") {
  MarketInstance inst = generate_random_gs(GsFamily::unit_demand, 3, 2, 9, 0);
  OracleCounter c;
  for (int i = 0; i < inst.m(); ++i) {
    CHECK(evaluate_mask(inst.buyers[i], 0, 3, c) == 0);
    for (Mask s = 0; s < 8; ++s) {
      std::int64_t v = evaluate_mask(inst.buyers[i], s, 3, c);
      CHECK(v >= 0);
      CHECK(v <= 9);
    }
  }
}

TEST_CASE("matroid-mix generator draws gross substitutes only") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 11ull, 99ull}) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 4, 3, 3, seed);
    for (const ValuationSpec& spec : inst.buyers)
      CHECK(check_gross_substitutes(spec, inst.n).is_gs);
  }
}

TEST_CASE("greedy attains the brute-force optimum exactly on checked GS specs") {
  SplitMix64 rng(2024);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 4, 1, 6, seed);
    const ValuationSpec& spec = inst.buyers[0];
    REQUIRE(check_gross_substitutes(spec, inst.n).is_gs);
    std::int64_t big = 2 * value_magnitude(spec, inst.n, inst.supply);
    for (int t = 0; t < 200; ++t) {
      PriceVector p(inst.n);
      for (int j = 0; j < inst.n; ++j) p[j] = Rat(rng.range(-big, big));
      OracleCounter c;
      CHECK(greedy_demand(spec, inst.n, p, c).utility ==
            brute_force_demand(spec, inst.supply, p).utility);
    }
  }
}

TEST_CASE("monotonicity scan flags decreasing tables") {
  CHECK(is_monotone(ValuationSpec::make_additive({0, 2}), 2, {1, 1}));
  CHECK_FALSE(is_monotone(ValuationSpec::make_subset_table({0, 3, 1, 2}), 2, {1, 1}));
  CHECK(is_monotone(ValuationSpec::make_subset_table({0, 1, 1, 2}), 2, {1, 1}));
}
