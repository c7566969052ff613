#include "walrus/bench.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "walrus/combinatorial.hpp"
#include "walrus/market.hpp"

namespace walrus {

std::vector<BenchRow> run_bench(const std::vector<int>& item_counts,
                                const std::vector<int>& buyer_counts, GsFamily family,
                                std::int64_t max_value, std::uint64_t seed, int core_buyers) {
  std::vector<BenchRow> rows;
  for (int n : item_counts) {
    for (int m : buyer_counts) {
      MarketInstance inst;
      if (core_buyers > 0 && m > core_buyers) {
        inst = generate_random_gs(family, n, core_buyers, max_value, seed);
        for (int i = core_buyers; i < m; ++i)
          inst.buyers.push_back(ValuationSpec::make_additive(std::vector<std::int64_t>(n, 0)));
      } else {
        inst = generate_random_gs(family, n, m, max_value, seed);
      }
      OracleCounter counter;
      std::vector<std::uint64_t> per_phase;
      CombinatorialOptions options;
      options.per_phase_value_calls = &per_phase;
      solve_welfare_incremental(inst, counter, options);
      for (std::size_t k = 0; k < per_phase.size(); ++k)
        rows.push_back({n, m, seed, static_cast<int>(k) + 1, per_phase[k]});
    }
  }
  // Deterministic order regardless of generation interleaving.
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.m != b.m) return a.m < b.m;
    return a.phase < b.phase;
  });
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n,m,seed,phase,value_calls\n";
  for (const BenchRow& r : rows)
    out << r.n << ',' << r.m << ',' << r.seed << ',' << r.phase << ',' << r.value_calls << '\n';
  return out.str();
}

ScalingFit fit_oracle_scaling(const std::vector<BenchRow>& rows) {
  std::map<std::pair<int, int>, double> totals;
  std::map<std::pair<int, int>, double> after_phase1;
  for (const BenchRow& r : rows) {
    totals[{r.n, r.m}] += static_cast<double>(r.value_calls);
    if (r.phase > 1) after_phase1[{r.n, r.m}] += static_cast<double>(r.value_calls);
  }

  // Weighted least squares on rows scaled by 1/total (relative residuals).
  double ata[3][3] = {};
  double atb[3] = {};
  for (const auto& [key, total] : totals) {
    double x[3] = {1.0, static_cast<double>(key.first) * key.second,
                   std::pow(static_cast<double>(key.first), 3)};
    double w = 1.0 / (total * total);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ata[r][c] += w * x[r] * x[c];
      atb[r] += w * x[r] * total;
    }
  }
  // Solve the 3x3 system by Gaussian elimination.
  double aug[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) aug[r][c] = ata[r][c];
    aug[r][3] = atb[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
    std::swap(aug[col], aug[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col || aug[col][col] == 0) continue;
      double f = aug[r][col] / aug[col][col];
      for (int c = col; c < 4; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  ScalingFit fit;
  fit.a = aug[0][3] / aug[0][0];
  fit.b = aug[1][3] / aug[1][1];
  fit.c = aug[2][3] / aug[2][2];

  fit.max_rel_residual = 0;
  for (const auto& [key, total] : totals) {
    double pred = fit.a + fit.b * key.first * key.second +
                  fit.c * std::pow(static_cast<double>(key.first), 3);
    fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(pred - total) / total);
  }

  // Calls after phase 1 must not depend on m.
  std::map<int, std::pair<double, double>> range;  // n -> (min, max)
  for (const auto& [key, calls] : after_phase1) {
    auto it = range.find(key.first);
    if (it == range.end())
      range[key.first] = {calls, calls};
    else {
      it->second.first = std::min(it->second.first, calls);
      it->second.second = std::max(it->second.second, calls);
    }
  }
  fit.after_phase1_spread = 0;
  for (const auto& [n, mm] : range)
    if (mm.first > 0)
      fit.after_phase1_spread =
          std::max(fit.after_phase1_spread, (mm.second - mm.first) / mm.first);
  return fit;
}

}  // namespace walrus
