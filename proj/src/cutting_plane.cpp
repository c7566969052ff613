#include "walrus/cutting_plane.hpp"

#include <cmath>

#include "walrus/combinatorial.hpp"
#include "walrus/oracles.hpp"
#include "walrus/verify.hpp"

namespace walrus {

namespace {

std::int64_t max_supply(const MarketInstance& inst) {
  std::int64_t s = 1;
  for (int q : inst.supply) s = std::max<std::int64_t>(s, q);
  return s;
}

// Lipschitz bound for the perturbed potential: |s + r - d| <= S(m+1) + 1
// per coordinate.
double lipschitz_bound(const MarketInstance& inst) {
  std::int64_t S = max_supply(inst);
  return std::sqrt(static_cast<double>(inst.n)) *
         (static_cast<double>(S) * (inst.m() + 1) + 1.0);
}

std::uint64_t iteration_budget(int n, double radius, double rho) {
  double t = 2.0 * n * n * (std::log(radius) - std::log(rho));
  return static_cast<std::uint64_t>(std::ceil(std::max(t, 1.0))) + 4ull * n * n + 16;
}

}  // namespace

PerturbationVector make_perturbation(const MarketInstance& inst, PerturbRegime regime,
                                     std::uint64_t seed) {
  PerturbationVector pv;
  pv.regime = regime;
  pv.seed = seed;
  const int n = inst.n;
  const std::int64_t S = max_supply(inst);
  pv.r.resize(n);
  if (regime == PerturbRegime::gs_deterministic) {
    Rat r(1, 2 * S * n);
    for (int j = 0; j < n; ++j) pv.r[j] = r;
    return pv;
  }
  // z_j uniform in [0, nM(nS)^2n - 1].  The denominator exceeds both the
  // optimality-preservation threshold (nS)^-(2n+1) per coordinate and the
  // vertex-gap bound, so the perturbed optimum stays an optimum.
  const Int M = std::max<std::int64_t>(magnitude_bound(inst), 1);
  const Int nS = Int(n) * S;
  const Int range = Int(n) * M * int_pow(nS, 2 * static_cast<unsigned>(n));
  const Int denom = M * M * Int(n) * Int(n) * int_pow(nS, 4 * static_cast<unsigned>(n) + 2);
  if (range > Int(std::uint64_t{1} << 62))
    throw BudgetError("perturbation sample range exceeds 2^62; instance too large");
  SplitMix64 rng(seed ^ 0x517CC1B727220A95ULL);
  for (int j = 0; j < n; ++j) {
    std::uint64_t z = rng.below(range.convert_to<std::uint64_t>());
    pv.r[j] = Rat(Int(z), denom);
  }
  return pv;
}

PriceVector round_prices(const PriceVector& approx, const MarketInstance& inst,
                         PerturbRegime regime) {
  PriceVector out(approx.size());
  if (regime == PerturbRegime::gs_deterministic) {
    for (std::size_t j = 0; j < approx.size(); ++j) out[j] = Rat(round_int(approx[j]));
    return out;
  }
  const Int max_den = int_pow(Int(inst.n) * max_supply(inst), static_cast<unsigned>(inst.n));
  for (std::size_t j = 0; j < approx.size(); ++j) {
    auto r = best_rational_approx(approx[j], max_den);
    if (!r)
      throw AmbiguityError("two denominator-bounded candidates equally close at coordinate " +
                           std::to_string(j + 1));
    out[j] = *r;
  }
  return out;
}

EquilibriumCertificate certificate_from_prices(const MarketInstance& inst,
                                               const PriceVector& prices,
                                               const Allocation& clearing) {
  EquilibriumCertificate cert;
  cert.prices = prices;
  cert.allocation = clearing;
  cert.witnesses.resize(inst.m());
  for (int i = 0; i < inst.m(); ++i) {
    cert.witnesses[i].kind = WitnessKind::brute_force_max;
    cert.witnesses[i].utility = utility_of_bundle(inst, i, clearing[i], prices);
  }
  return cert;
}

namespace {

struct PipelineResult {
  bool success = false;
  PriceVector prices;
  Allocation clearing;
};

// Try one exact candidate: verify membership and keep the clearing witness.
bool try_candidate(const MarketInstance& inst, const PriceVector& cand, PipelineResult& out) {
  MembershipVerdict v = walrasian_membership(inst, cand);
  if (!v.member) return false;
  out.success = true;
  out.prices = cand;
  out.clearing = *v.clearing;
  return true;
}

SolveReport finish(const MarketInstance& inst, SolveReport rep, const PipelineResult& res) {
  rep.verdict = SolveVerdict::equilibrium;
  rep.prices = res.prices;
  EquilibriumCertificate cert = certificate_from_prices(inst, res.prices, res.clearing);
  cert.oracle_calls = rep.oracle_calls;
  rep.welfare = social_welfare(inst, res.clearing);
  rep.certificate = std::move(cert);
  return rep;
}

SolveReport gs_pipeline(const MarketInstance& inst, std::uint64_t seed) {
  SolveReport rep;
  rep.method = "ellipsoid-gs";
  if (!inst.single_unit())
    throw DomainError("gs ellipsoid requires a single-unit instance");
  const int n = inst.n;
  const std::int64_t M = std::max<std::int64_t>(magnitude_bound(inst), 1);
  const std::int64_t S = 1;
  PerturbationVector pv = make_perturbation(inst, PerturbRegime::gs_deterministic, seed);

  SubgradientFn sub = [&](const PriceVector& p) {
    std::vector<int> d = aggregate_demand(inst, p, DemandMode::greedy_gs, rep.oracle_calls);
    std::vector<Rat> g(n);
    for (int j = 0; j < n; ++j) g[j] = Rat(inst.supply[j]) + pv.r[j] - d[j];
    return g;
  };
  ValueFn val = [&](const PriceVector& p) {
    Rat f = 0;
    for (int i = 0; i < inst.m(); ++i)
      f += greedy_demand(inst.buyers[i], n, p, rep.oracle_calls).utility;
    for (int j = 0; j < n; ++j) f += p[j] * (Rat(inst.supply[j]) + pv.r[j]);
    return f;
  };

  const double L = lipschitz_bound(inst);
  const Rat box = Rat(2 * M);
  const double radius = 2.0 * static_cast<double>(M) * std::sqrt(static_cast<double>(n));
  Rat eps = Rat(1, 5 * n * M * S);
  for (int attempt = 0; attempt <= 10; ++attempt, ++rep.retries) {
    double rho = eps.convert_to<double>() / (2.0 * L * std::sqrt(static_cast<double>(n)));
    EllipsoidOptions opt;
    opt.box_bound = box;
    opt.stop_ball_radius = Rat(rho);
    opt.max_iters = iteration_budget(n, radius, rho);
    EllipsoidOutcome out;
    try {
      out = ellipsoid_minimize(n, sub, &val, opt);
    } catch (const NumericError&) {
      opt.high_precision = true;
      out = ellipsoid_minimize(n, sub, &val, opt);
    }
    rep.iterations += out.iterations;
    const PriceVector& approx = out.best_point ? *out.best_point : out.final_center;
    PriceVector cand = round_prices(approx, inst, PerturbRegime::gs_deterministic);
    PipelineResult res;
    if (try_candidate(inst, cand, res)) return finish(inst, std::move(rep), res);
    eps /= 2;
  }
  rep.verdict = SolveVerdict::inconclusive;
  return rep;
}

SolveReport general_pipeline(const MarketInstance& inst, std::uint64_t seed) {
  SolveReport rep;
  rep.method = "ellipsoid-general";
  const int n = inst.n;
  const std::int64_t M = std::max<std::int64_t>(magnitude_bound(inst), 1);
  const std::int64_t S = max_supply(inst);
  if (n > 6)
    throw BudgetError("general-exact ellipsoid is restricted to n <= 6 (epsilon underflows)");

  const double L = lipschitz_bound(inst);
  const Rat box = Rat(2 * M);
  const double radius = 2.0 * static_cast<double>(M) * std::sqrt(static_cast<double>(n));
  const Int nms = Int(n) * M * S;
  Rat eps = Rat(1, int_pow(nms, 5 * static_cast<unsigned>(n) + 3));

  for (int attempt = 0; attempt <= 10; ++attempt, ++rep.retries) {
    // Each retry resamples the random perturbation with a derived seed.
    PerturbationVector pv = make_perturbation(inst, PerturbRegime::general_random,
                                              seed + 0x9E3779B9ULL * attempt);
    SubgradientFn sub = [&](const PriceVector& p) {
      std::vector<int> d = aggregate_demand(inst, p, DemandMode::brute_force, rep.oracle_calls);
      std::vector<Rat> g(n);
      for (int j = 0; j < n; ++j) g[j] = Rat(inst.supply[j]) + pv.r[j] - d[j];
      return g;
    };
    ValueFn val = [&](const PriceVector& p) {
      Rat f = 0;
      for (int i = 0; i < inst.m(); ++i) {
        ++rep.oracle_calls.demand_calls;
        f += brute_force_demand(inst.buyers[i], inst.supply, p).utility;
      }
      for (int j = 0; j < n; ++j) f += p[j] * (Rat(inst.supply[j]) + pv.r[j]);
      return f;
    };

    double rho = eps.convert_to<double>() / (2.0 * L * std::sqrt(static_cast<double>(n)));
    EllipsoidOptions opt;
    opt.box_bound = box;
    opt.stop_ball_radius = Rat(rho);
    opt.max_iters = iteration_budget(n, radius, rho);
    opt.high_precision = true;
    EllipsoidOutcome out = ellipsoid_minimize(n, sub, &val, opt);
    rep.iterations += out.iterations;
    const PriceVector& approx = out.best_point ? *out.best_point : out.final_center;
    try {
      PriceVector cand = round_prices(approx, inst, PerturbRegime::general_random);
      PipelineResult res;
      if (try_candidate(inst, cand, res)) return finish(inst, std::move(rep), res);
    } catch (const AmbiguityError&) {
      // fall through to a retry with smaller epsilon
    }
    eps /= 2;
  }
  // Exhausted retries: for general valuations equilibria may simply not
  // exist; the verdict is negative, never a false certificate.
  rep.verdict = SolveVerdict::no_equilibrium_found;
  return rep;
}

SolveReport regularized_pipeline(const MarketInstance& inst, std::uint64_t seed) {
  SolveReport rep;
  rep.method = "ellipsoid-gs-regularized";
  if (!inst.single_unit())
    throw DomainError("regularized gs ellipsoid requires a single-unit instance");
  const int n = inst.n;
  const std::int64_t M = std::max<std::int64_t>(magnitude_bound(inst), 1);
  (void)seed;

  SingletonCache cache;
  // One AllGreedy run serves both callbacks at the same query point.
  PriceVector memo_point;
  AllGreedyResult memo;
  bool memo_valid = false;
  auto run_all_greedy = [&](const PriceVector& p) -> const AllGreedyResult& {
    if (!memo_valid || memo_point != p) {
      memo = all_greedy(inst, p, rep.oracle_calls, &cache);
      memo_point = p;
      memo_valid = true;
    }
    return memo;
  };
  SubgradientFn sub = [&](const PriceVector& p) {
    const AllGreedyResult& ag = run_all_greedy(p);
    std::vector<Rat> g(n);
    for (int j = 0; j < n; ++j) g[j] = Rat(ag.subgradient[j]);
    return g;
  };
  ValueFn val = [&](const PriceVector& p) {
    const AllGreedyResult& ag = run_all_greedy(p);
    Rat f = ag.surplus;
    for (int j = 0; j < n; ++j) f += p[j];
    return f;
  };

  const double L = std::sqrt(static_cast<double>(n)) * (inst.m() + 1.0);
  const Rat box = Rat(2 * M + 1);
  const double radius = (2.0 * M + 1.0) * std::sqrt(static_cast<double>(n));
  Rat eps = Rat(1, 5 * n * M);

  for (int attempt = 0; attempt <= 10; ++attempt, ++rep.retries) {
    double rho = eps.convert_to<double>() / (2.0 * L * std::sqrt(static_cast<double>(n)));
    EllipsoidOptions opt;
    opt.box_bound = box;
    opt.stop_ball_radius = Rat(rho);
    opt.max_iters = iteration_budget(n, radius, rho);
    EllipsoidOutcome out;
    try {
      out = ellipsoid_minimize(n, sub, &val, opt);
    } catch (const NumericError&) {
      opt.high_precision = true;
      out = ellipsoid_minimize(n, sub, &val, opt);
    }
    rep.iterations += out.iterations;

    std::optional<PriceVector> anchor;
    if (out.zero_subgradient_point)
      anchor = out.zero_subgradient_point;
    else if (out.best_point)
      anchor = out.best_point;
    else
      anchor = out.final_center;

    // Shift by gamma onto the Walrasian polytope, then round.  The price
    // polytope is an integral lattice polytope cut by difference and bound
    // constraints, so some uniform-threshold rounding of a point near it is
    // exactly Walrasian; scan n+2 thresholds.
    const AllGreedyResult ag = all_greedy(inst, *anchor, rep.oracle_calls, &cache);
    PriceVector shifted(n);
    for (int j = 0; j < n; ++j) shifted[j] = (*anchor)[j] + ag.gamma;

    std::vector<Rat> thetas;
    thetas.push_back(Rat(1, 2));
    for (int i = 0; i <= n; ++i) thetas.push_back(Rat(2 * i + 1, 2 * (n + 1)));
    std::vector<PriceVector> seen;
    PipelineResult res;
    for (const Rat& theta : thetas) {
      PriceVector cand(n);
      for (int j = 0; j < n; ++j) cand[j] = Rat(floor_int(shifted[j] + theta));
      bool dup = false;
      for (const PriceVector& s : seen)
        if (s == cand) dup = true;
      if (dup) continue;
      seen.push_back(cand);
      if (try_candidate(inst, cand, res)) return finish(inst, std::move(rep), res);
    }
    // Exact shifted point as a last resort (interior minimizers).
    if (try_candidate(inst, shifted, res)) return finish(inst, std::move(rep), res);
    eps /= 2;
  }
  rep.verdict = SolveVerdict::inconclusive;
  return rep;
}

}  // namespace

SolveReport solve_walrasian_prices(const MarketInstance& inst, Algorithm algorithm,
                                   std::uint64_t seed) {
  inst.validate();
  switch (algorithm) {
    case Algorithm::ellipsoid_gs:
      return gs_pipeline(inst, seed);
    case Algorithm::ellipsoid_general:
      return general_pipeline(inst, seed);
    case Algorithm::ellipsoid_gs_regularized:
      return regularized_pipeline(inst, seed);
    case Algorithm::combinatorial: {
      OracleCounter counter;
      SolveReport rep = solve_welfare_incremental(inst, counter);
      return rep;
    }
  }
  throw DomainError("unknown algorithm");
}

}  // namespace walrus
