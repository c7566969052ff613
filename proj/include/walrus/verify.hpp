#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walrus/market.hpp"

namespace walrus {

// Enumeration budget for the brute-force oracles; the WALRUS_BUDGET
// environment variable overrides the default of 2^22.
std::uint64_t verify_budget();

struct WelfareResult {
  Rat value;
  std::vector<Allocation> optima;  // capped at optima_cap entries
  std::uint64_t optimum_count = 0;
  std::uint64_t enumerated = 0;
  bool capped = false;

  static constexpr std::uint64_t optima_cap = 50000;
};

// Exhaustive enumeration of all exact partitions of the supply.
WelfareResult brute_force_welfare(const MarketInstance& inst);

struct MembershipVerdict {
  bool member = false;
  std::string reason;
  int failing_buyer = -1;  // 0-indexed, -1 when not buyer-specific
  int failing_item = -1;
  std::optional<Allocation> clearing;  // found by the selection search
};

// With an allocation: checks x_i attains the brute-force demand maximum for
// every buyer and that the allocation is valid.  Without: searches for a
// market-clearing selection from the exact demand sets.
MembershipVerdict walrasian_membership(const MarketInstance& inst, const PriceVector& prices,
                                       const Allocation* allocation = nullptr);

struct WalrasianSet {
  std::vector<std::vector<std::int64_t>> integral_points;
  std::optional<std::vector<std::int64_t>> lattice_min, lattice_max;
  bool exists = false;
};

// Scans every integer price vector in [-2M, 2M]^n for membership.
// Complete for gross-substitutes markets, where the price polytope is
// integral; for general valuations it is only a sufficient check.
WalrasianSet enumerate_integral_walrasian(const MarketInstance& inst);

struct TheoremVerdict {
  bool pass = true;
  std::string detail;
};

// First theorem: certified welfare equals the brute-force optimum.  Second:
// every brute-force optimal allocation is supported by the certified prices.
TheoremVerdict check_welfare_theorems(const MarketInstance& inst,
                                      const EquilibriumCertificate& cert);

// Exact optimum of the fractional assignment relaxation (rational simplex).
Rat configuration_lp_value(const MarketInstance& inst);

// A Walrasian equilibrium exists iff the relaxation admits an integral
// optimum, i.e. its value equals the best partition welfare.
bool equilibrium_exists_bruteforce(const MarketInstance& inst);

}  // namespace walrus
