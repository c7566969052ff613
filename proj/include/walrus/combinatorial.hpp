#pragma once

#include <cstdint>
#include <vector>

#include "walrus/market.hpp"
#include "walrus/solve_report.hpp"

namespace walrus {

// One item-insertion phase: the lexicographic shortest augmenting path taken
// and the price decrements it prescribed.
struct PhaseTrace {
  int phase = 0;                        // 1-indexed
  int item = 0;                         // item inserted this phase, 1-indexed
  std::vector<int> path;                // node sequence, 0 = phi, else 1-indexed item
  std::vector<std::int64_t> distance;   // truncated d(j) per inserted item, path order n/a
  std::vector<int> distance_item;       // 1-indexed items matching `distance`
};

struct CombinatorialOptions {
  bool random_order = false;  // item insertion order; correctness is order-free
  std::uint64_t order_seed = 0;
  std::vector<PhaseTrace>* trace = nullptr;
  std::vector<std::uint64_t>* per_phase_value_calls = nullptr;  // bench accounting
};

// Incremental welfare solver: items enter one at a time, each phase resolved
// by a lexicographic Dijkstra run on the exchange graph (collapsed phi node,
// sorted singleton lists for inactive buyers).  Exact integer arithmetic
// throughout; the add/remove/swap certificate is re-checked after every
// phase.  Requires a single-unit instance with monotone valuations.
SolveReport solve_welfare_incremental(const MarketInstance& inst, OracleCounter& counter,
                                      const CombinatorialOptions& options = {});

}  // namespace walrus
