#pragma once

#include "walrus/market.hpp"

namespace walrus::fixtures {

// Two unit-supply items, three identical buyers valuing any nonempty set
// at 1.  Unique Walrasian price (1,1); six optimal assignments.
inline MarketInstance instance_a() {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {1, 1};
  for (int i = 0; i < 3; ++i)
    inst.buyers.push_back(ValuationSpec::make_unit_demand({1, 1}));
  return inst;
}

// Single additive buyer with weights (3,5).
inline MarketInstance instance_b() {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {1, 1};
  inst.buyers.push_back(ValuationSpec::make_additive({3, 5}));
  return inst;
}

// min(|S|,2) versus additive all-ones on three items; many optimal splits.
inline MarketInstance instance_c() {
  MarketInstance inst;
  inst.n = 3;
  inst.supply = {1, 1, 1};
  inst.buyers.push_back(ValuationSpec::make_uniform_matroid(2, {1, 1, 1}));
  inst.buyers.push_back(ValuationSpec::make_additive({1, 1, 1}));
  return inst;
}

// Additive (4,1,1) versus additive (1,3,2); unique optimum
// {1} -> buyer 1, {2,3} -> buyer 2 with welfare 9.
inline MarketInstance instance_d() {
  MarketInstance inst;
  inst.n = 3;
  inst.supply = {1, 1, 1};
  inst.buyers.push_back(ValuationSpec::make_additive({4, 1, 1}));
  inst.buyers.push_back(ValuationSpec::make_additive({1, 3, 2}));
  return inst;
}

// Pure complements pair on two items: worthless until completed.
inline ValuationSpec complements_pair(std::int64_t both = 1) {
  return ValuationSpec::make_subset_table({0, 0, 0, both});
}

// Two identical complements buyers over unit supply.  The relaxation has an
// integral optimum here, so an equilibrium exists (e.g. prices (0,1)).
inline MarketInstance complements_twins() {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {1, 1};
  inst.buyers.push_back(complements_pair());
  inst.buyers.push_back(complements_pair());
  return inst;
}

// Complements buyer v({1,2}) = 3 against a unit-demand buyer at 2: the
// relaxation reaches 7/2 > 3, so no Walrasian equilibrium exists.
inline MarketInstance complements_vs_unit_demand() {
  MarketInstance inst;
  inst.n = 2;
  inst.supply = {1, 1};
  inst.buyers.push_back(complements_pair(3));
  inst.buyers.push_back(ValuationSpec::make_unit_demand({2, 2}));
  return inst;
}

inline PriceVector prices(std::initializer_list<Rat> xs) { return PriceVector(xs); }

inline Bundle subset(std::initializer_list<int> items_1indexed, int n) {
  Bundle b = Bundle::empty(n);
  for (int j : items_1indexed) b.quantities[j - 1] = 1;
  return b;
}

}  // namespace walrus::fixtures
