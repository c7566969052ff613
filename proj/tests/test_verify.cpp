#include <doctest.h>

#include "fixtures.hpp"
#include "walrus/cutting_plane.hpp"
#include "walrus/verify.hpp"

using namespace walrus;
using namespace walrus::fixtures;

TEST_CASE("brute-force welfare enumerates all partitions") {
  WelfareResult a = brute_force_welfare(instance_a());
  CHECK(a.value == 2);
  CHECK(a.optimum_count == 6);
  CHECK(a.enumerated == 9);

  WelfareResult d = brute_force_welfare(instance_d());
  CHECK(d.value == 9);
  CHECK(d.optimum_count == 1);
  Allocation want = {subset({1}, 3), subset({2, 3}, 3)};
  CHECK(d.optima.front() == want);

  WelfareResult b = brute_force_welfare(instance_b());
  CHECK(b.value == 8);
  CHECK(b.optimum_count == 1);

  // All partitions giving the uniform-matroid buyer at most two items tie.
  WelfareResult c = brute_force_welfare(instance_c());
  CHECK(c.value == 3);
  CHECK(c.optimum_count == 7);
}

TEST_CASE("multi-unit welfare enumeration distributes every unit") {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {2, 1};
  inst.buyers.push_back(ValuationSpec::make_additive({3, 1}));
  inst.buyers.push_back(ValuationSpec::make_additive({1, 4}));
  WelfareResult r = brute_force_welfare(inst);
  CHECK(r.enumerated == 6);  // 3 ways for the double item, 2 for the single
  CHECK(r.value == 10);
  CHECK(r.optimum_count == 1);
}

TEST_CASE("membership accepts the Walrasian price of instance A and rejects others") {
  MarketInstance a = instance_a();
  MembershipVerdict yes = walrasian_membership(a, prices({1, 1}));
  CHECK(yes.member);
  REQUIRE(yes.clearing.has_value());
  CHECK(validate_allocation(a, *yes.clearing).valid);

  CHECK_FALSE(walrasian_membership(a, prices({Rat(1, 2), Rat(1, 2)})).member);
  CHECK_FALSE(walrasian_membership(instance_b(), prices({4, 0})).member);
}

TEST_CASE("membership with an explicit allocation pinpoints the failing buyer") {
  MarketInstance a = instance_a();
  Allocation good = {subset({1}, 2), subset({2}, 2), subset({}, 2)};
  CHECK(walrasian_membership(a, prices({1, 1}), &good).member);

  Allocation invalid = {subset({1}, 2), subset({1}, 2), subset({}, 2)};
  MembershipVerdict v1 = walrasian_membership(a, prices({1, 1}), &invalid);
  CHECK_FALSE(v1.member);
  CHECK(v1.failing_item == 0);

  MarketInstance d = instance_d();
  Allocation swapped = {subset({2}, 3), subset({1, 3}, 3)};
  MembershipVerdict v2 = walrasian_membership(d, prices({2, 2, Rat(3, 2)}), &swapped);
  CHECK_FALSE(v2.member);
  CHECK(v2.failing_buyer >= 0);
}

TEST_CASE("integral Walrasian scan: box, lattice extremes, existence") {
  WalrasianSet a = enumerate_integral_walrasian(instance_a());
  REQUIRE(a.exists);
  REQUIRE(a.integral_points.size() == 1);
  CHECK(a.integral_points[0] == std::vector<std::int64_t>{1, 1});
  CHECK(*a.lattice_min == *a.lattice_max);

  WalrasianSet b = enumerate_integral_walrasian(instance_b());
  REQUIRE(b.exists);
  CHECK(*b.lattice_max == std::vector<std::int64_t>{3, 5});
  CHECK(*b.lattice_min == std::vector<std::int64_t>{-16, -16});
  for (const auto& p : b.integral_points) {
    CHECK(p[0] <= 3);
    CHECK(p[1] <= 5);
    CHECK(p[0] >= -16);
    CHECK(p[1] >= -16);
  }
  CHECK(b.integral_points.size() == 20u * 22u);

  // The twin-complements market clears at (0,1): one buyer takes both items.
  WalrasianSet twins = enumerate_integral_walrasian(complements_twins());
  CHECK(twins.exists);

  // Complements against unit demand: no equilibrium at any price.
  WalrasianSet mixed = enumerate_integral_walrasian(complements_vs_unit_demand());
  CHECK_FALSE(mixed.exists);
}

TEST_CASE("lattice closure of the integral Walrasian set") {
  for (std::uint64_t seed : {4ull, 9ull, 21ull}) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 3, 3, 4, seed);
    WalrasianSet ws = enumerate_integral_walrasian(inst);
    REQUIRE(ws.exists);
    std::set<std::vector<std::int64_t>> points(ws.integral_points.begin(),
                                               ws.integral_points.end());
    for (const auto& p : ws.integral_points)
      for (const auto& q : ws.integral_points) {
        std::vector<std::int64_t> lo(inst.n), hi(inst.n);
        for (int j = 0; j < inst.n; ++j) {
          lo[j] = std::min(p[j], q[j]);
          hi[j] = std::max(p[j], q[j]);
        }
        CHECK(points.count(lo) == 1);
        CHECK(points.count(hi) == 1);
      }
  }
}

TEST_CASE("welfare theorems hold for good certificates and fail for tampered ones") {
  MarketInstance d = instance_d();
  Allocation opt = {subset({1}, 3), subset({2, 3}, 3)};
  EquilibriumCertificate cert = certificate_from_prices(d, prices({2, 2, Rat(3, 2)}), opt);
  CHECK(check_welfare_theorems(d, cert).pass);

  MarketInstance a = instance_a();
  WelfareResult wf = brute_force_welfare(a);
  for (const Allocation& alloc : wf.optima) {
    EquilibriumCertificate c = certificate_from_prices(a, prices({1, 1}), alloc);
    CHECK(check_welfare_theorems(a, c).pass);
  }

  EquilibriumCertificate tampered =
      certificate_from_prices(d, prices({2, 2, Rat(3, 2)}),
                              {subset({2}, 3), subset({1, 3}, 3)});
  TheoremVerdict verdict = check_welfare_theorems(d, tampered);
  CHECK_FALSE(verdict.pass);
  CHECK_FALSE(verdict.detail.empty());
}

TEST_CASE("exact relaxation value detects equilibrium existence") {
  CHECK(configuration_lp_value(instance_a()) == 2);
  CHECK(configuration_lp_value(instance_b()) == 8);
  CHECK(equilibrium_exists_bruteforce(instance_a()));
  CHECK(equilibrium_exists_bruteforce(instance_b()));
  CHECK(equilibrium_exists_bruteforce(complements_twins()));

  // The fractional optimum 7/2 strictly beats the best partition (3).
  MarketInstance neg = complements_vs_unit_demand();
  CHECK(configuration_lp_value(neg) == Rat(7, 2));
  CHECK(brute_force_welfare(neg).value == 3);
  CHECK_FALSE(equilibrium_exists_bruteforce(neg));
}

TEST_CASE("existence oracle agrees with the integral scan on substitutes") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 3, 2, 4, seed);
    CHECK(equilibrium_exists_bruteforce(inst));
    CHECK(enumerate_integral_walrasian(inst).exists);
  }
}

TEST_CASE("budget guards raise explicit errors") {
  MarketInstance big = generate_random_gs(GsFamily::additive, 6, 2, 200, 0);
  CHECK_THROWS_AS(enumerate_integral_walrasian(big), BudgetError);
}
