#include <doctest.h>

#include "fixtures.hpp"
#include "walrus/cutting_plane.hpp"
#include "walrus/oracles.hpp"
#include "walrus/verify.hpp"

using namespace walrus;
using namespace walrus::fixtures;

TEST_CASE("gs perturbation is the deterministic 1/(2Sn) vector") {
  PerturbationVector pv =
      make_perturbation(instance_a(), PerturbRegime::gs_deterministic, 0);
  CHECK(pv.r == std::vector<Rat>{Rat(1, 4), Rat(1, 4)});
}

TEST_CASE("random perturbation is seeded, small, and within the vertex-gap bound") {
  MarketInstance inst = complements_vs_unit_demand();
  PerturbationVector one = make_perturbation(inst, PerturbRegime::general_random, 42);
  PerturbationVector two = make_perturbation(inst, PerturbRegime::general_random, 42);
  CHECK(one.r == two.r);
  PerturbationVector other = make_perturbation(inst, PerturbRegime::general_random, 43);
  CHECK(one.r != other.r);

  const int n = inst.n;
  std::int64_t S = 1;
  Rat limit(1, int_pow(Int(n) * S, 2 * static_cast<unsigned>(n) + 1));
  for (const Rat& r : one.r) {
    CHECK(r >= 0);
    CHECK(r < limit);
  }
}

TEST_CASE("ellipsoid stops immediately on a zero subgradient") {
  SubgradientFn zero = [](const PriceVector& p) {
    return std::vector<Rat>(p.size(), Rat(0));
  };
  EllipsoidOptions opt;
  opt.box_bound = 8;
  EllipsoidOutcome out = ellipsoid_minimize(3, zero, nullptr, opt);
  CHECK(out.stop == EllipsoidStop::zero_subgradient);
  CHECK(out.iterations == 0);
  REQUIRE(out.zero_subgradient_point.has_value());
  CHECK(*out.zero_subgradient_point == PriceVector(3, Rat(0)));
}

TEST_CASE("perturbed ellipsoid on instance B lands within rounding range") {
  MarketInstance b = instance_b();
  PerturbationVector pv = make_perturbation(b, PerturbRegime::gs_deterministic, 0);
  OracleCounter counter;
  SubgradientFn sub = [&](const PriceVector& p) {
    std::vector<int> d = aggregate_demand(b, p, DemandMode::greedy_gs, counter);
    std::vector<Rat> g(b.n);
    for (int j = 0; j < b.n; ++j) g[j] = Rat(b.supply[j]) + pv.r[j] - d[j];
    return g;
  };
  ValueFn val = [&](const PriceVector& p) {
    std::vector<Rat> r = pv.r;
    return potential_value(b, p, PotentialVariant::perturbed, &r);
  };
  EllipsoidOptions opt;
  opt.box_bound = 16;
  opt.stop_ball_radius = Rat(1, 4096);
  opt.max_iters = 4000;
  EllipsoidOutcome out = ellipsoid_minimize(2, sub, &val, opt);
  REQUIRE(out.best_point.has_value());
  PriceVector rounded = round_prices(*out.best_point, b, PerturbRegime::gs_deterministic);
  for (int j = 0; j < b.n; ++j) CHECK(rat_abs((*out.best_point)[j] - rounded[j]) < Rat(1, 2));
  CHECK(walrasian_membership(b, rounded).member);
}

TEST_CASE("rounding: nearest integer, continued fractions, idempotence") {
  MarketInstance a = instance_a();
  PriceVector close = {Rat(9993, 10000), Rat(10021, 10000)};
  CHECK(round_prices(close, a, PerturbRegime::gs_deterministic) == PriceVector{1, 1});

  // Denominator bound (nS)^n = 4 on a two-item market.
  PriceVector frac = {Rat(3338, 10000), Rat(3338, 10000)};
  PriceVector cf = round_prices(frac, a, PerturbRegime::general_random);
  CHECK(cf == PriceVector{Rat(1, 3), Rat(1, 3)});

  PriceVector exact = {2, -3};
  CHECK(round_prices(exact, a, PerturbRegime::gs_deterministic) == exact);
  CHECK(round_prices(exact, a, PerturbRegime::general_random) == exact);
}

TEST_CASE("gs ellipsoid certifies the unique price of instance A") {
  SolveReport rep = solve_walrasian_prices(instance_a(), Algorithm::ellipsoid_gs, 0);
  REQUIRE(rep.verdict == SolveVerdict::equilibrium);
  CHECK(rep.prices == PriceVector{1, 1});
  REQUIRE(rep.certificate.has_value());
  CHECK(walrasian_membership(instance_a(), rep.prices, &rep.certificate->allocation).member);
  CHECK(check_welfare_theorems(instance_a(), *rep.certificate).pass);
}

TEST_CASE("gs ellipsoid returns an integral Walrasian price of instance B") {
  MarketInstance b = instance_b();
  SolveReport rep = solve_walrasian_prices(b, Algorithm::ellipsoid_gs, 0);
  REQUIRE(rep.verdict == SolveVerdict::equilibrium);
  for (const Rat& p : rep.prices) CHECK(is_integer(p));
  CHECK(rep.prices[0] <= 3);
  CHECK(rep.prices[1] <= 5);
  CHECK(walrasian_membership(b, rep.prices).member);

  // The supply-side perturbation drives prices to the lattice minimum of the
  // searched box; record the selected extreme against the enumerated set.
  WalrasianSet ws = enumerate_integral_walrasian(b);
  std::vector<std::int64_t> got;
  for (const Rat& p : rep.prices) got.push_back(num(p).convert_to<std::int64_t>());
  CHECK(got == *ws.lattice_min);
}

TEST_CASE("perturbed optimum is unique: rounded output is start-independent") {
  MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 4, 3, 8, 77);
  PerturbationVector pv = make_perturbation(inst, PerturbRegime::gs_deterministic, 0);
  OracleCounter counter;
  SubgradientFn sub = [&](const PriceVector& p) {
    std::vector<int> d = aggregate_demand(inst, p, DemandMode::greedy_gs, counter);
    std::vector<Rat> g(inst.n);
    for (int j = 0; j < inst.n; ++j) g[j] = Rat(inst.supply[j]) + pv.r[j] - d[j];
    return g;
  };
  ValueFn val = [&](const PriceVector& p) {
    std::vector<Rat> r = pv.r;
    return potential_value(inst, p, PotentialVariant::perturbed, &r);
  };
  std::int64_t M = magnitude_bound(inst);
  std::vector<PriceVector> starts = {{},
                                     PriceVector(inst.n, Rat(M)),
                                     PriceVector(inst.n, Rat(-M, 2)),
                                     PriceVector(inst.n, Rat(3, 7))};
  std::optional<PriceVector> reference;
  for (const PriceVector& start : starts) {
    EllipsoidOptions opt;
    opt.box_bound = Rat(2 * M);
    opt.stop_ball_radius = Rat(1, 40 * inst.n * M);
    opt.max_iters = 20000;
    opt.start = start;
    EllipsoidOutcome out = ellipsoid_minimize(inst.n, sub, &val, opt);
    REQUIRE(out.best_point.has_value());
    PriceVector rounded = round_prices(*out.best_point, inst, PerturbRegime::gs_deterministic);
    CHECK(walrasian_membership(inst, rounded).member);
    if (!reference)
      reference = rounded;
    else
      CHECK(*reference == rounded);
  }
}

TEST_CASE("plain unperturbed ellipsoid queries an interior point of a fat polytope") {
  // The Walrasian prices of instance D contain the integral cube
  // (1,4)x(1,3)x(1,2), so a zero subgradient must be queried within the
  // volume budget.
  MarketInstance d = instance_d();
  OracleCounter counter;
  SubgradientFn sub = [&](const PriceVector& p) {
    return potential_subgradient(d, p, PotentialVariant::plain, counter);
  };
  std::int64_t M = magnitude_bound(d);
  EllipsoidOptions opt;
  opt.box_bound = Rat(2 * M);
  opt.max_iters = interior_query_budget(
      d.n, 2.0 * static_cast<double>(M) * std::sqrt(3.0), 1.0);
  EllipsoidOutcome out = ellipsoid_minimize(d.n, sub, nullptr, opt);
  REQUIRE(out.zero_subgradient_point.has_value());
  CHECK(walrasian_membership(d, *out.zero_subgradient_point).member);
}

TEST_CASE("regularized gs solver certifies the fixtures") {
  for (const MarketInstance& inst :
       {instance_a(), instance_b(), instance_c(), instance_d()}) {
    SolveReport rep = solve_walrasian_prices(inst, Algorithm::ellipsoid_gs_regularized, 0);
    REQUIRE(rep.verdict == SolveVerdict::equilibrium);
    CHECK(walrasian_membership(inst, rep.prices, &rep.certificate->allocation).member);
    CHECK(check_welfare_theorems(inst, *rep.certificate).pass);
  }
}

TEST_CASE("gs solvers certify random substitutes instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    MarketInstance inst = generate_random_gs(GsFamily::matroid_rank_mix, 1 + seed % 5,
                                             1 + (seed * 7) % 4, 9, 9000 + seed);
    for (Algorithm alg : {Algorithm::ellipsoid_gs, Algorithm::ellipsoid_gs_regularized}) {
      SolveReport rep = solve_walrasian_prices(inst, alg, seed);
      REQUIRE(rep.verdict == SolveVerdict::equilibrium);
      CHECK(walrasian_membership(inst, rep.prices, &rep.certificate->allocation).member);
    }
  }
}

TEST_CASE("general ellipsoid finds the twin-complements equilibrium") {
  // The relaxation has an integral optimum here (prices like (0,1) clear),
  // so the solver must certify rather than report absence.
  MarketInstance twins = complements_twins();
  REQUIRE(equilibrium_exists_bruteforce(twins));
  SolveReport rep = solve_walrasian_prices(twins, Algorithm::ellipsoid_general, 1);
  REQUIRE(rep.verdict == SolveVerdict::equilibrium);
  CHECK(walrasian_membership(twins, rep.prices, &rep.certificate->allocation).member);
}

TEST_CASE("general ellipsoid reports absence for complements vs unit demand") {
  MarketInstance neg = complements_vs_unit_demand();
  REQUIRE_FALSE(equilibrium_exists_bruteforce(neg));
  SolveReport rep = solve_walrasian_prices(neg, Algorithm::ellipsoid_general, 1);
  CHECK(rep.verdict == SolveVerdict::no_equilibrium_found);
  CHECK_FALSE(rep.certificate.has_value());
}

TEST_CASE("general ellipsoid matches the existence oracle on random tables") {
  int positives = 0, negatives = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MarketInstance inst = generate_random_general(2 + seed % 2, 2, 4, 2, 500 + seed);
    bool exists = equilibrium_exists_bruteforce(inst);
    SolveReport rep = solve_walrasian_prices(inst, Algorithm::ellipsoid_general, seed);
    if (exists) {
      ++positives;
      REQUIRE(rep.verdict == SolveVerdict::equilibrium);
      CHECK(walrasian_membership(inst, rep.prices, &rep.certificate->allocation).member);
    } else {
      ++negatives;
      CHECK(rep.verdict == SolveVerdict::no_equilibrium_found);
    }
  }
  CHECK(positives > 0);
  CHECK(negatives > 0);
}

TEST_CASE("multi-unit instances are rejected by the gs pipelines") {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {2, 1};
  inst.buyers.push_back(ValuationSpec::make_additive({3, 5}));
  CHECK_THROWS_AS(solve_walrasian_prices(inst, Algorithm::ellipsoid_gs, 0), DomainError);
  CHECK_THROWS_AS(solve_walrasian_prices(inst, Algorithm::ellipsoid_gs_regularized, 0),
                  DomainError);
}
