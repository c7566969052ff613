#include <doctest.h>

#include "fixtures.hpp"
#include "walrus/oracles.hpp"
#include "walrus/verify.hpp"

using namespace walrus;
using namespace walrus::fixtures;

TEST_CASE("greedy demand walks the largest strictly positive marginal") {
  OracleCounter c;
  ValuationSpec add = ValuationSpec::make_additive({3, 5});
  DemandResult r = greedy_demand(add, 2, prices({4, 4}), c);
  CHECK(r.bundle == subset({2}, 2));
  CHECK(r.utility == 1);

  // Zero marginals do not enter (strict inequality).
  DemandResult stop = greedy_demand(instance_a().buyers[0], 2, prices({1, 1}), c);
  CHECK(stop.bundle == subset({}, 2));
  CHECK(stop.utility == 0);

  ValuationSpec rank2 = ValuationSpec::make_uniform_matroid(2, {1, 1, 1});
  DemandResult u = greedy_demand(rank2, 3, prices({Rat(1, 2), Rat(1, 4), Rat(3, 4)}), c);
  CHECK(u.bundle == subset({1, 2}, 3));
  CHECK(u.utility == Rat(5, 4));
  CHECK(u.utility == brute_force_demand(rank2, {1, 1, 1},
                                        prices({Rat(1, 2), Rat(1, 4), Rat(3, 4)}))
                         .utility);
}

TEST_CASE("greedy call count stays within n(|S|+1) + n") {
  SplitMix64 rng(17);
  for (int t = 0; t < 40; ++t) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 5, 1, 9, t);
    PriceVector p(5);
    for (auto& x : p) x = Rat(rng.range(-9, 9), rng.range(1, 3));
    OracleCounter c;
    DemandResult r = greedy_demand(inst.buyers[0], 5, p, c);
    std::uint64_t size = static_cast<std::uint64_t>(r.bundle.total());
    CHECK(c.value_calls <= 5 * (size + 1) + 5);
  }
}

TEST_CASE("brute-force demand returns the full set, lexicographically sorted") {
  MarketInstance a = instance_a();
  DemandResult r = brute_force_demand(a.buyers[0], a.supply, prices({1, 1}));
  REQUIRE(r.full_set.has_value());
  std::vector<Bundle> expect = {subset({}, 2), subset({2}, 2), subset({1}, 2)};
  CHECK(*r.full_set == expect);  // (0,0) < (0,1) < (1,0)
  CHECK(r.bundle == subset({}, 2));
  CHECK(r.utility == 0);

  ValuationSpec add = ValuationSpec::make_additive({3, 5});
  DemandResult b = brute_force_demand(add, {1, 1}, prices({0, 0}));
  CHECK(b.full_set->size() == 1);
  CHECK(b.bundle == subset({1, 2}, 2));

  DemandResult comp = brute_force_demand(complements_pair(), {1, 1},
                                         prices({Rat(2, 5), Rat(2, 5)}));
  CHECK(comp.full_set->size() == 1);
  CHECK(comp.bundle == subset({1, 2}, 2));
  CHECK(comp.utility == Rat(1, 5));
}

TEST_CASE("brute-force demand covers multi-unit domains") {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {2, 1};
  inst.buyers.push_back(ValuationSpec::make_additive({3, 5}));
  DemandResult r = brute_force_demand(inst.buyers[0], inst.supply, prices({2, 6}));
  CHECK(r.bundle == Bundle({2, 0}));
  CHECK(r.utility == 2);
}

TEST_CASE("aggregate demand sums deterministic per-buyer selections") {
  MarketInstance a = instance_a();
  OracleCounter c;
  CHECK(aggregate_demand(a, prices({1, 1}), DemandMode::greedy_gs, c) ==
        std::vector<int>{0, 0});
  CHECK(aggregate_demand(instance_b(), prices({0, 0}), DemandMode::greedy_gs, c) ==
        std::vector<int>{1, 1});
  // At zero prices every buyer's greedy stops after item 1: the second unit
  // of value never has a strictly positive marginal for unit demand.
  CHECK(aggregate_demand(a, prices({0, 0}), DemandMode::greedy_gs, c) ==
        std::vector<int>{3, 0});
  CHECK(c.aggregate_calls == 3);
}

TEST_CASE("plain potential folds the dual constraints into the objective") {
  CHECK(potential_value(instance_a(), prices({1, 1}), PotentialVariant::plain) == 2);
  CHECK(potential_value(instance_b(), prices({0, 0}), PotentialVariant::plain) == 8);
  // Perturbed adds p.r.
  std::vector<Rat> r = {Rat(1, 4), Rat(1, 4)};
  CHECK(potential_value(instance_b(), prices({2, 2}), PotentialVariant::perturbed, &r) ==
        Rat(9));
}

TEST_CASE("subgradients come from the aggregate demand") {
  OracleCounter c;
  CHECK(potential_subgradient(instance_b(), prices({0, 0}), PotentialVariant::plain, c) ==
        std::vector<Rat>{0, 0});
  // Greedy tie-break sends all three buyers to item 1 at zero prices.
  CHECK(potential_subgradient(instance_a(), prices({0, 0}), PotentialVariant::plain, c) ==
        std::vector<Rat>{-2, 1});
  CHECK(potential_subgradient(instance_a(), prices({1, 1}), PotentialVariant::plain, c) ==
        std::vector<Rat>{1, 1});
}

TEST_CASE("subgradient inequality holds on random pairs") {
  SplitMix64 rng(555);
  int checked = 0;
  for (int t = 0; t < 25; ++t) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 4, 3, 6, 1000 + t);
    std::int64_t big = 2 * magnitude_bound(inst);
    for (int pair = 0; pair < 20; ++pair) {
      PriceVector p(inst.n), q(inst.n);
      for (int j = 0; j < inst.n; ++j) {
        p[j] = Rat(rng.range(-big, big), rng.range(1, 4));
        q[j] = Rat(rng.range(-big, big), rng.range(1, 4));
      }
      OracleCounter c;
      std::vector<Rat> g = potential_subgradient(inst, p, PotentialVariant::plain, c);
      Rat fp = potential_value(inst, p, PotentialVariant::plain);
      Rat fq = potential_value(inst, q, PotentialVariant::plain);
      Rat dot = 0;
      for (int j = 0; j < inst.n; ++j) dot += g[j] * (q[j] - p[j]);
      CHECK(fq - fp >= dot);
      ++checked;
    }
  }
  CHECK(checked == 500);
}

TEST_CASE("every brute-force demand selection yields a valid subgradient") {
  SplitMix64 rng(777);
  for (int t = 0; t < 10; ++t) {
    MarketInstance inst = generate_random_gs(GsFamily::unit_demand, 3, 2, 5, 300 + t);
    PriceVector p(inst.n);
    for (auto& x : p) x = Rat(rng.range(-10, 10), 2);
    std::vector<std::vector<Bundle>> sets;
    for (int i = 0; i < inst.m(); ++i)
      sets.push_back(*brute_force_demand(inst.buyers[i], inst.supply, p).full_set);
    Rat fp = potential_value(inst, p, PotentialVariant::plain);
    for (const Bundle& x0 : sets[0])
      for (const Bundle& x1 : sets[1]) {
        std::vector<Rat> g(inst.n);
        for (int j = 0; j < inst.n; ++j)
          g[j] = Rat(inst.supply[j] - x0.quantities[j] - x1.quantities[j]);
        for (int probe = 0; probe < 10; ++probe) {
          PriceVector q(inst.n);
          for (auto& x : q) x = Rat(rng.range(-10, 10), 3);
          Rat dot = 0;
          for (int j = 0; j < inst.n; ++j) dot += g[j] * (q[j] - p[j]);
          CHECK(potential_value(inst, q, PotentialVariant::plain) - fp >= dot);
        }
      }
  }
}

TEST_CASE("AllGreedy performs n steps and reports gamma of the last one") {
  MarketInstance b = instance_b();
  OracleCounter c;
  AllGreedyResult r = all_greedy(b, prices({7, -2}), c);
  CHECK(r.total_size == 2);
  CHECK(r.sets[0] == 0b11u);

  MarketInstance a = instance_a();
  AllGreedyResult ra = all_greedy(a, prices({0, 0}), c);
  CHECK(ra.total_size == 2);
  CHECK(ra.gamma == 1);
  // Both steps grab the value-1 item 1 (ties resolve to the lowest indices).
  CHECK(ra.sets[0] == 0b01u);
  CHECK(ra.sets[1] == 0b01u);
  CHECK(ra.subgradient == std::vector<int>{-1, 1});
}

TEST_CASE("the AllGreedy vector is a genuine subgradient of the regularized potential") {
  SplitMix64 rng(909);
  for (int t = 0; t < 20; ++t) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 3, 3, 7, 4000 + t);
    std::int64_t big = 2 * magnitude_bound(inst);
    for (int pair = 0; pair < 15; ++pair) {
      PriceVector p(inst.n), q(inst.n);
      for (int j = 0; j < inst.n; ++j) {
        p[j] = Rat(rng.range(-big, big), rng.range(1, 4));
        q[j] = Rat(rng.range(-big, big), rng.range(1, 4));
      }
      OracleCounter c;
      AllGreedyResult ag = all_greedy(inst, p, c);
      Rat fp = potential_value(inst, p, PotentialVariant::regularized);
      Rat fq = potential_value(inst, q, PotentialVariant::regularized);
      Rat dot = 0;
      for (int j = 0; j < inst.n; ++j) dot += Rat(ag.subgradient[j]) * (q[j] - p[j]);
      CHECK(fq - fp >= dot);
    }
  }
}

TEST_CASE("regularized potential equals the shifted plain potential") {
  SplitMix64 rng(31337);
  MarketInstance instances[] = {instance_a(), instance_b(), instance_c(),
                                generate_random_gs(GsFamily::matroid_rank_mix, 4, 3, 5, 5)};
  for (const MarketInstance& inst : instances) {
    for (int t = 0; t < 40; ++t) {
      PriceVector p(inst.n);
      for (auto& x : p) x = Rat(rng.range(-12, 12), rng.range(1, 5));
      OracleCounter c;
      AllGreedyResult ag = all_greedy(inst, p, c);
      Rat reg = potential_value(inst, p, PotentialVariant::regularized);
      PriceVector shifted(p);
      for (auto& x : shifted) x += ag.gamma;
      CHECK(reg == potential_value(inst, shifted, PotentialVariant::plain));
      // The sets are demanded at the shifted prices.
      for (int i = 0; i < inst.m(); ++i) {
        Rat u = utility_of_bundle(inst, i, Bundle::from_mask(ag.sets[i], inst.n), shifted);
        CHECK(u == brute_force_demand(inst.buyers[i], inst.supply, shifted).utility);
      }
    }
  }
}

TEST_CASE("instance C at zero prices: the regularized identity, traced") {
  MarketInstance c = instance_c();
  OracleCounter counter;
  AllGreedyResult ag = all_greedy(c, prices({0, 0, 0}), counter);
  CHECK(ag.total_size == 3);
  CHECK(potential_value(c, prices({0, 0, 0}), PotentialVariant::regularized) == 3);
  PriceVector shifted = prices({ag.gamma, ag.gamma, ag.gamma});
  CHECK(potential_value(c, shifted, PotentialVariant::plain) == 3);
}

TEST_CASE("minimizers transfer between the plain and regularized potentials") {
  // Tiny integer grid search for the regularized minimum.
  MarketInstance insts[] = {instance_a(), instance_d()};
  for (const MarketInstance& inst : insts) {
    std::int64_t M = magnitude_bound(inst);
    Rat best;
    std::vector<PriceVector> argmin;
    bool first = true;
    std::vector<std::int64_t> p(inst.n, -2 * M);
    for (;;) {
      PriceVector pr(inst.n);
      for (int j = 0; j < inst.n; ++j) pr[j] = Rat(p[j]);
      Rat v = potential_value(inst, pr, PotentialVariant::regularized);
      if (first || v < best) {
        best = v;
        argmin.assign(1, pr);
        first = false;
      } else if (v == best) {
        argmin.push_back(pr);
      }
      int j = inst.n - 1;
      while (j >= 0 && p[j] == 2 * M) p[j--] = -2 * M;
      if (j < 0) break;
      ++p[j];
    }
    // Shift any grid minimizer by its gamma: Walrasian prices.
    OracleCounter c;
    for (const PriceVector& pr : argmin) {
      AllGreedyResult ag = all_greedy(inst, pr, c);
      PriceVector shifted(pr);
      for (auto& x : shifted) x += ag.gamma;
      CHECK(walrasian_membership(inst, shifted).member);
    }
    // Every integral Walrasian price attains the same minimum value.
    WalrasianSet ws = enumerate_integral_walrasian(inst);
    for (const auto& ip : ws.integral_points) {
      PriceVector pr(inst.n);
      for (int j = 0; j < inst.n; ++j) pr[j] = Rat(ip[j]);
      CHECK(potential_value(inst, pr, PotentialVariant::regularized) == best);
    }
  }
}
