#pragma once

#include <optional>
#include <vector>

#include "walrus/market.hpp"

namespace walrus {

struct DemandResult {
  Bundle bundle;
  Rat utility;
  // Brute-force mode only: every utility maximizer, lexicographically sorted.
  std::optional<std::vector<Bundle>> full_set;
};

// Greedy demand for single-unit valuations: keep adding the item of largest
// strictly positive marginal (ties to the lowest item index).  Attains the
// maximum utility exactly when the valuation is gross substitutes.
DemandResult greedy_demand(const ValuationSpec& spec, int n, const PriceVector& prices,
                           OracleCounter& counter);

// Exhaustive demand oracle over the full domain; budget 2^20 bundles.
DemandResult brute_force_demand(const ValuationSpec& spec, const std::vector<int>& supply,
                                const PriceVector& prices);

enum class DemandMode { greedy_gs, brute_force };

// d(p) = sum_i x_i with x_i in D(i, p); the per-buyer selection is fixed by
// the deterministic tie-break of the underlying oracle.
std::vector<int> aggregate_demand(const MarketInstance& inst, const PriceVector& prices,
                                  DemandMode mode, OracleCounter& counter);

enum class PotentialVariant { plain, perturbed, regularized };

// Sets of the AllGreedy run: m bundles of total size exactly n, the price
// threshold gamma of the last step, and a subgradient of the regularized
// potential.
struct AllGreedyResult {
  std::vector<Mask> sets;
  Rat gamma;
  // Subgradient of the regularized potential: supply minus multiplicity,
  // g_j = 1 - #{i : j in S*_i}.  Zero exactly when the sets partition [n].
  std::vector<int> subgradient;
  int total_size = 0;
  Rat surplus;  // sum_i v_i(S*_i) - p(S*_i)
};

// Singleton values v_i({j}) shared across repeated AllGreedy runs on the
// same instance; costs m*n value calls to fill once.
struct SingletonCache {
  bool built = false;
  std::vector<std::int64_t> v;  // index i * n + j

  void build(const MarketInstance& inst, OracleCounter& counter);
};

// n parallel-greedy augmentation steps, globally largest marginal first
// (ties: lowest buyer, then lowest item).
AllGreedyResult all_greedy(const MarketInstance& inst, const PriceVector& prices,
                           OracleCounter& counter, SingletonCache* cache = nullptr);

// f(p) = sum_i max_x (v_i(x) - p.x) + p.s, the dual objective with the
// constraints folded in.  The perturbed variant adds p.r; the regularized
// variant restricts bundle profiles to total size n and is evaluated through
// AllGreedy.
Rat potential_value(const MarketInstance& inst, const PriceVector& prices,
                    PotentialVariant variant, const std::vector<Rat>* perturbation = nullptr);

// plain: s - d(p); perturbed: s + r - d(p); regularized: AllGreedy subgradient.
std::vector<Rat> potential_subgradient(const MarketInstance& inst, const PriceVector& prices,
                                       PotentialVariant variant, OracleCounter& counter,
                                       const std::vector<Rat>* perturbation = nullptr);

}  // namespace walrus
