#pragma once

#include <cstdint>
#include <vector>

#include "walrus/ellipsoid.hpp"
#include "walrus/market.hpp"
#include "walrus/solve_report.hpp"

namespace walrus {

enum class PerturbRegime { gs_deterministic, general_random };

// Objective perturbation p.r making the dual optimum unique: the
// deterministic 1/(2Sn) vector for gross substitutes, seeded
// Klivans-Spielman integers otherwise.
struct PerturbationVector {
  std::vector<Rat> r;
  PerturbRegime regime = PerturbRegime::gs_deterministic;
  std::uint64_t seed = 0;
};

PerturbationVector make_perturbation(const MarketInstance& inst, PerturbRegime regime,
                                     std::uint64_t seed);

// Rounding a rounding-radius-close approximation lands on two candidates at
// once; callers retry with a smaller epsilon.
struct AmbiguityError : std::runtime_error {
  explicit AmbiguityError(const std::string& msg) : std::runtime_error(msg) {}
};

// gs: componentwise nearest integer.  general: componentwise best rational
// approximation with denominator at most (nS)^n.
PriceVector round_prices(const PriceVector& approx, const MarketInstance& inst,
                         PerturbRegime regime);

enum class Algorithm { ellipsoid_general, ellipsoid_gs, ellipsoid_gs_regularized, combinatorial };

// Perturb, minimize the perturbed (or regularized) potential by ellipsoid,
// round, verify exactly; halve epsilon and retry on verification failure.
SolveReport solve_walrasian_prices(const MarketInstance& inst, Algorithm algorithm,
                                   std::uint64_t seed);

// Certificate assembly from exactly verified prices (clearing selection from
// the brute-force demand sets).  Shared with the combinatorial solver's
// reporting path.
EquilibriumCertificate certificate_from_prices(const MarketInstance& inst,
                                               const PriceVector& prices,
                                               const Allocation& clearing);

}  // namespace walrus
