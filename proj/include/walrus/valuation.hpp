#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walrus/bundle.hpp"
#include "walrus/errors.hpp"
#include "walrus/rational.hpp"

namespace walrus {

struct MarketInstance;

// Per-run cost accounting for the three oracle access modes.
struct OracleCounter {
  std::uint64_t value_calls = 0;
  std::uint64_t demand_calls = 0;
  std::uint64_t aggregate_calls = 0;

  OracleCounter& operator+=(const OracleCounter& o) {
    value_calls += o.value_calls;
    demand_calls += o.demand_calls;
    aggregate_calls += o.aggregate_calls;
    return *this;
  }
};

enum class ValuationKind { explicit_table, additive, unit_demand, weighted_matroid_rank };

enum class MatroidType { uniform, partition };

struct MatroidDesc {
  MatroidType type = MatroidType::uniform;
  int rank = 0;                          // uniform
  std::vector<std::vector<int>> blocks;  // partition, 0-indexed items
  std::vector<int> capacities;           // per block
};

// A buyer's valuation.  Integer-valued, v(empty) = 0.  Explicit tables cover
// the full domain and are indexed mixed-radix by quantities (plain bitmask
// when supply is all ones).
struct ValuationSpec {
  ValuationKind kind = ValuationKind::additive;
  std::vector<std::int64_t> weights;  // additive or matroid item weights
  std::vector<std::int64_t> values;   // unit_demand per-item values
  MatroidDesc matroid;
  std::vector<std::int64_t> table;  // explicit_table entries
  std::vector<int> radices;         // explicit_table: supply[j] + 1 per item

  static ValuationSpec make_additive(std::vector<std::int64_t> w);
  static ValuationSpec make_unit_demand(std::vector<std::int64_t> v);
  static ValuationSpec make_uniform_matroid(int rank, std::vector<std::int64_t> w);
  static ValuationSpec make_partition_matroid(std::vector<std::vector<int>> blocks,
                                              std::vector<int> capacities,
                                              std::vector<std::int64_t> w);
  static ValuationSpec make_table(std::vector<std::int64_t> table, std::vector<int> supply);
  // Single-unit table from a 2^n value array indexed by mask.
  static ValuationSpec make_subset_table(std::vector<std::int64_t> by_mask);

  void validate(int n, const std::vector<int>& supply) const;
};

// Value oracle.  Increments counter.value_calls by one.
std::int64_t evaluate(const ValuationSpec& spec, const Bundle& bundle, OracleCounter& counter);

// Single-unit fast path.
std::int64_t evaluate_mask(const ValuationSpec& spec, Mask mask, int n, OracleCounter& counter);

// max_x |v(x)| for this buyer, by family formula or full table scan.
std::int64_t value_magnitude(const ValuationSpec& spec, int n, const std::vector<int>& supply);

// True when v(x) <= v(y) whenever x <= y componentwise.  Families with
// non-negative parameters are monotone by construction; tables are scanned.
bool is_monotone(const ValuationSpec& spec, int n, const std::vector<int>& supply);

struct GsViolation {
  Mask basis_b = 0;   // over the doubled ground set [2n]
  Mask basis_b2 = 0;
  int element_u = -1;
};

struct GsCheckResult {
  bool is_gs = false;
  std::optional<GsViolation> violation;
};

// Exchange-inequality check of the induced weighting of n-subsets of [2n];
// exact and finite.  Hard limit n <= 8.
GsCheckResult check_gross_substitutes(const ValuationSpec& spec, int n);

enum class GsFamily { additive, unit_demand, matroid_rank_mix };

// Deterministic seeded single-unit GS instance.  Parameters are drawn in
// [0, max_value]; every buyer is a weighted matroid rank function.
MarketInstance generate_random_gs(GsFamily family, int n, int m, std::int64_t max_value,
                                  std::uint64_t seed);

// Seeded multi-unit instance with explicit tables; no structure promised.
MarketInstance generate_random_general(int n, int m, std::int64_t max_value, int max_supply,
                                       std::uint64_t seed);

}  // namespace walrus
