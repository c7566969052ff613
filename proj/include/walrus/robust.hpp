#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "walrus/market.hpp"

namespace walrus {

// Exchange graph of an optimal allocation over the augmented ground set:
// real items 0..n-1, one dummy per buyer (node n+i), plus one free dummy
// (node n+m) so removals are expressible for every m.  An arc (j -> k) for
// agent i with j in S_i, k not in S_i carries w = v_i(S_i) - v_i(S_i+k-j)
// and encodes the constraint p_j - p_k <= w (dummy prices pinned to 0).
struct ExchangeArc {
  int from = 0;
  int to = 0;
  std::int64_t weight = 0;
  int agent = -1;
};

struct AllocationExchangeGraph {
  int n = 0;
  int m = 0;
  std::vector<ExchangeArc> arcs;
  std::vector<Mask> bundles;  // seeding allocation, per buyer

  int nodes() const { return n + m + 1; }
  bool is_dummy(int node) const { return node >= n; }
};

// Builds the graph and confirms by Bellman-Ford that it has no negative
// cycle; a negative cycle means the seeding allocation is not optimal.
AllocationExchangeGraph build_allocation_exchange_graph(const MarketInstance& inst,
                                                        const Allocation& allocation);

struct ZeroCycle {
  std::vector<int> nodes;  // cyclic sequence, nodes[0] repeated implicitly
};

// Minimum-hop zero-weight cycle through at least one real item, when one
// exists.  Zero cycles are exactly the alternative-optimum witnesses.
std::optional<ZeroCycle> detect_zero_weight_cycle(const AllocationExchangeGraph& graph);

// Applies the swaps prescribed by a cycle to the seeding allocation.
Allocation apply_cycle_swaps(const MarketInstance& inst, const AllocationExchangeGraph& graph,
                             const ZeroCycle& cycle);

struct RobustPriceReport {
  bool exists = false;
  PriceVector prices;         // denominators divide 2n
  Rat slack;                  // measured minimum inequality slack
  std::optional<ZeroCycle> cycle_witness;  // non-uniqueness
  std::vector<Rat> potential;              // node potentials when exists
};

// Shortest-path potentials on the slack-augmented graph; every price in the
// +-1/(2n) cube around the result is Walrasian and every buyer's demand set
// is the singleton {S_i}.
RobustPriceReport compute_robust_prices(const MarketInstance& inst, const Allocation& allocation);

struct IsolationRecord {
  std::int64_t N = 0;                       // additive weights drawn from [1..N]
  std::int64_t B = 0;                       // base-value scale
  std::vector<std::vector<std::int64_t>> w;  // per buyer, per item
};

// Isolation-lemma perturbation: scale values by B and add small random
// additive weights so the optimal partition becomes unique (w.h.p.) while
// every optimum still maps to an optimum of the original instance.
std::pair<MarketInstance, IsolationRecord> isolation_perturb(const MarketInstance& inst,
                                                             std::uint64_t seed);

// AllGreedy sets at a zero-subgradient point of the regularized potential;
// they partition the items and form a welfare-optimal allocation.
Allocation recover_allocation_interior(const MarketInstance& inst,
                                       const PriceVector& interior_price);

struct IsolationPipelineResult {
  bool success = false;
  Allocation allocation;   // of the original instance
  PriceVector interior_price;  // of the perturbed instance
  Rat gamma;
  int attempts = 0;
};

// Full allocation-recovery pipeline: perturb, hunt a zero-subgradient point
// of the perturbed regularized potential by ellipsoid, read the allocation
// off AllGreedy.  Failed hunts are detected and retried with fresh seeds.
IsolationPipelineResult compute_allocation_via_isolation(const MarketInstance& inst,
                                                         std::uint64_t seed,
                                                         int max_attempts = 3);

}  // namespace walrus
