#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walrus/bundle.hpp"
#include "walrus/errors.hpp"
#include "walrus/rational.hpp"
#include "walrus/valuation.hpp"

namespace walrus {

// A market of indivisible goods: n items with integer supply, m buyers.
// Immutable after construction; all operations on it are pure.
struct MarketInstance {
  int n = 0;
  std::vector<int> supply;
  std::vector<ValuationSpec> buyers;

  int m() const { return static_cast<int>(buyers.size()); }

  bool single_unit() const {
    for (int s : supply)
      if (s != 1) return false;
    return true;
  }

  Mask full_mask() const { return (Mask{1} << n) - 1; }

  // Throws MalformedError when any structural invariant fails.
  void validate() const;
};

// Per-buyer bundles; a valid allocation partitions the supply exactly.
using Allocation = std::vector<Bundle>;

struct ValidityReport {
  bool valid = true;
  int first_violation_item = -1;  // 0-indexed
  int demanded = 0;
  int supplied = 0;
};

// u_i(x; p) = v_i(x) - p.x, exact.
Rat utility_of_bundle(const MarketInstance& inst, int buyer, const Bundle& bundle,
                      const PriceVector& prices);

// sum_i v_i(x_i); does not require the allocation to be valid.
Rat social_welfare(const MarketInstance& inst, const Allocation& alloc);

ValidityReport validate_allocation(const MarketInstance& inst, const Allocation& alloc);

// M = max_i max_x |v_i(x)|; solvers search the box [-2M, 2M]^n.
std::int64_t magnitude_bound(const MarketInstance& inst);

enum class WitnessKind { brute_force_max, local_conditions };

struct BuyerWitness {
  WitnessKind kind = WitnessKind::brute_force_max;
  Rat utility;  // attained utility of the assigned bundle
};

// Prices plus an allocation, with a per-buyer record of which optimality
// test established demand-set membership.
struct EquilibriumCertificate {
  PriceVector prices;
  Allocation allocation;
  std::vector<BuyerWitness> witnesses;
  OracleCounter oracle_calls;
};

inline std::string item_label(int j) { return std::to_string(j + 1); }   // 1-indexed in messages
inline std::string buyer_label(int i) { return std::to_string(i + 1); }

}  // namespace walrus
