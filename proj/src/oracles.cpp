#include "walrus/oracles.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace walrus {

DemandResult greedy_demand(const ValuationSpec& spec, int n, const PriceVector& prices,
                           OracleCounter& counter) {
  ++counter.demand_calls;
  Mask taken = 0;
  std::int64_t v_cur = 0;  // v(empty) = 0
  Rat paid = 0;
  for (;;) {
    bool found = false;
    int best_item = -1;
    Rat best_marginal;
    std::int64_t best_value = 0;
    for (int j = 0; j < n; ++j) {
      if (taken >> j & 1u) continue;
      std::int64_t vj = evaluate_mask(spec, taken | (Mask{1} << j), n, counter);
      Rat marginal = Rat(vj - v_cur) - prices[j];
      if (marginal > 0 && (!found || marginal > best_marginal)) {
        found = true;
        best_item = j;
        best_marginal = marginal;
        best_value = vj;
      }
    }
    if (!found) break;
    taken |= Mask{1} << best_item;
    v_cur = best_value;
    paid += prices[best_item];
    if (taken == (Mask{1} << n) - 1) break;
  }
  DemandResult r;
  r.bundle = Bundle::from_mask(taken, n);
  r.utility = Rat(v_cur) - paid;
  return r;
}

DemandResult brute_force_demand(const ValuationSpec& spec, const std::vector<int>& supply,
                                const PriceVector& prices) {
  const int n = static_cast<int>(supply.size());
  std::size_t domain = 1;
  for (int j = 0; j < n; ++j) {
    domain *= static_cast<std::size_t>(supply[j] + 1);
    if (domain > (std::size_t{1} << 20))
      throw BudgetError("demand enumeration domain exceeds 2^20 bundles");
  }
  OracleCounter scratch;
  std::vector<Bundle> best_set;
  Rat best_utility;
  std::vector<int> q(n, 0);
  bool first = true;
  for (;;) {
    Bundle b{q};
    Rat u = Rat(evaluate(spec, b, scratch)) - dot(prices, b);
    if (first || u > best_utility) {
      best_utility = u;
      best_set.clear();
      best_set.push_back(b);
      first = false;
    } else if (u == best_utility) {
      best_set.push_back(b);
    }
    int j = n - 1;
    while (j >= 0 && q[j] == supply[j]) q[j--] = 0;
    if (j < 0) break;
    ++q[j];
  }
  std::sort(best_set.begin(), best_set.end());
  DemandResult r;
  r.bundle = best_set.front();
  r.utility = best_utility;
  r.full_set = std::move(best_set);
  return r;
}

std::vector<int> aggregate_demand(const MarketInstance& inst, const PriceVector& prices,
                                  DemandMode mode, OracleCounter& counter) {
  ++counter.aggregate_calls;
  std::vector<int> d(inst.n, 0);
  for (int i = 0; i < inst.m(); ++i) {
    Bundle x;
    if (mode == DemandMode::greedy_gs) {
      if (!inst.single_unit())
        throw DomainError("greedy aggregate demand requires a single-unit instance");
      x = greedy_demand(inst.buyers[i], inst.n, prices, counter).bundle;
    } else {
      ++counter.demand_calls;
      x = brute_force_demand(inst.buyers[i], inst.supply, prices).bundle;
    }
    for (int j = 0; j < inst.n; ++j) d[j] += x.quantities[j];
  }
  return d;
}

namespace {

struct MarginalKey {
  Rat marginal;
  int buyer;
  // Largest marginal first, then lowest buyer index.
  bool operator<(const MarginalKey& o) const {
    if (marginal != o.marginal) return marginal > o.marginal;
    return buyer < o.buyer;
  }
};

}  // namespace

void SingletonCache::build(const MarketInstance& inst, OracleCounter& counter) {
  const int n = inst.n;
  v.resize(static_cast<std::size_t>(inst.m()) * n);
  for (int i = 0; i < inst.m(); ++i)
    for (int j = 0; j < n; ++j)
      v[static_cast<std::size_t>(i) * n + j] =
          evaluate_mask(inst.buyers[i], Mask{1} << j, n, counter);
  built = true;
}

AllGreedyResult all_greedy(const MarketInstance& inst, const PriceVector& prices,
                           OracleCounter& counter, SingletonCache* cache) {
  if (!inst.single_unit()) throw DomainError("AllGreedy requires a single-unit instance");
  const int n = inst.n;
  const int m = inst.m();

  SingletonCache local;
  SingletonCache* singles = cache ? cache : &local;
  if (!singles->built) singles->build(inst, counter);

  // L_j: buyers not holding j, ordered by current marginal for j.
  std::vector<std::set<MarginalKey>> lists(n);
  std::vector<std::vector<Rat>> marginal(m, std::vector<Rat>(n));
  std::vector<std::int64_t> v_cur(m, 0);
  std::vector<Mask> sets(m, 0);

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      marginal[i][j] = Rat(singles->v[static_cast<std::size_t>(i) * n + j]) - prices[j];
      lists[j].insert({marginal[i][j], i});
    }

  AllGreedyResult out;
  out.subgradient.assign(n, 1);
  Rat gamma;
  for (int step = 0; step < n; ++step) {
    int best_item = -1, best_buyer = -1;
    Rat best;
    for (int j = 0; j < n; ++j) {
      if (lists[j].empty()) continue;
      const MarginalKey& top = *lists[j].begin();
      if (best_item < 0 || top.marginal > best ||
          (top.marginal == best && (top.buyer < best_buyer ||
                                    (top.buyer == best_buyer && j < best_item)))) {
        best = top.marginal;
        best_item = j;
        best_buyer = top.buyer;
      }
    }
    gamma = best;
    const int i = best_buyer, j = best_item;
    lists[j].erase({marginal[i][j], i});
    sets[i] |= Mask{1} << j;
    --out.subgradient[j];
    // marginal + p_j is the integral value gain of the step.
    Rat gain = marginal[i][j] + prices[j];
    v_cur[i] += static_cast<std::int64_t>(num(gain));
    // The winner's remaining marginals change; each list update is O(log m).
    for (int k = 0; k < n; ++k) {
      if (sets[i] >> k & 1u) continue;
      std::int64_t vk = evaluate_mask(inst.buyers[i], sets[i] | (Mask{1} << k), n, counter);
      Rat fresh = Rat(vk - v_cur[i]) - prices[k];
      lists[k].erase({marginal[i][k], i});
      marginal[i][k] = fresh;
      lists[k].insert({fresh, i});
    }
  }
  out.sets = sets;
  out.gamma = gamma;
  out.surplus = 0;
  for (int i = 0; i < m; ++i) {
    out.total_size += std::popcount(sets[i]);
    out.surplus += Rat(v_cur[i]) - mask_price(prices, sets[i]);
  }
  return out;
}

Rat potential_value(const MarketInstance& inst, const PriceVector& prices,
                    PotentialVariant variant, const std::vector<Rat>* perturbation) {
  if (variant == PotentialVariant::regularized) {
    OracleCounter scratch;
    AllGreedyResult ag = all_greedy(inst, prices, scratch);
    Rat f = ag.surplus;
    for (int j = 0; j < inst.n; ++j) f += prices[j];
    return f;
  }
  Rat f = 0;
  for (int i = 0; i < inst.m(); ++i)
    f += brute_force_demand(inst.buyers[i], inst.supply, prices).utility;
  for (int j = 0; j < inst.n; ++j) f += prices[j] * inst.supply[j];
  if (variant == PotentialVariant::perturbed) {
    if (perturbation == nullptr) throw DomainError("perturbed potential needs a vector r");
    for (int j = 0; j < inst.n; ++j) f += prices[j] * (*perturbation)[j];
  }
  return f;
}

std::vector<Rat> potential_subgradient(const MarketInstance& inst, const PriceVector& prices,
                                       PotentialVariant variant, OracleCounter& counter,
                                       const std::vector<Rat>* perturbation) {
  std::vector<Rat> g(inst.n);
  if (variant == PotentialVariant::regularized) {
    AllGreedyResult ag = all_greedy(inst, prices, counter);
    for (int j = 0; j < inst.n; ++j) g[j] = ag.subgradient[j];
    return g;
  }
  DemandMode mode = inst.single_unit() ? DemandMode::greedy_gs : DemandMode::brute_force;
  std::vector<int> d = aggregate_demand(inst, prices, mode, counter);
  for (int j = 0; j < inst.n; ++j) g[j] = Rat(inst.supply[j] - d[j]);
  if (variant == PotentialVariant::perturbed) {
    if (perturbation == nullptr) throw DomainError("perturbed potential needs a vector r");
    for (int j = 0; j < inst.n; ++j) g[j] += (*perturbation)[j];
  }
  return g;
}

}  // namespace walrus
