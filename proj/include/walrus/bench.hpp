#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walrus/valuation.hpp"

namespace walrus {

struct BenchRow {
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  int phase = 0;  // 1-indexed
  std::uint64_t value_calls = 0;
};

// Combinatorial-solver sweep over item and buyer counts; one row per phase.
// A nonzero core pins the market: the first `core_buyers` buyers are drawn
// from the family and the rest are zero-valuation fillers, so the sweep
// varies the buyer count without changing the equilibrium being computed
// (fillers still flow through the sorted lists and head scans).
std::vector<BenchRow> run_bench(const std::vector<int>& item_counts,
                                const std::vector<int>& buyer_counts, GsFamily family,
                                std::int64_t max_value, std::uint64_t seed,
                                int core_buyers = 0);

std::string bench_csv(const std::vector<BenchRow>& rows);

struct ScalingFit {
  double a = 0, b = 0, c = 0;       // calls ~ a + b*nm + c*n^3
  double max_rel_residual = 1e9;    // over the (n, m) totals
  double after_phase1_spread = 1e9; // m-sensitivity of calls after phase 1
};

// Relative least squares of the per-(n, m) totals against a + b*nm + c*n^3,
// plus the spread of post-phase-1 calls across buyer counts.
ScalingFit fit_oracle_scaling(const std::vector<BenchRow>& rows);

}  // namespace walrus
