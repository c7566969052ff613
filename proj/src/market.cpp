#include "walrus/market.hpp"

namespace walrus {

void MarketInstance::validate() const {
  if (n < 1) throw MalformedError("instance needs at least one item");
  if (buyers.empty()) throw MalformedError("instance needs at least one buyer");
  if (static_cast<int>(supply.size()) != n)
    throw MalformedError("supply length does not match item count");
  for (int j = 0; j < n; ++j)
    if (supply[j] < 0)
      throw MalformedError("negative supply for item " + item_label(j));
  if (n > 62) throw MalformedError("item count exceeds 62");
  for (int i = 0; i < m(); ++i) {
    try {
      buyers[i].validate(n, supply);
    } catch (const MalformedError& e) {
      throw MalformedError("buyer " + buyer_label(i) + ": " + e.what());
    }
  }
}

Rat utility_of_bundle(const MarketInstance& inst, int buyer, const Bundle& bundle,
                      const PriceVector& prices) {
  if (buyer < 0 || buyer >= inst.m()) throw DomainError("buyer index out of range");
  if (!bundle.within(inst.supply)) throw DomainError("bundle exceeds supply bounds");
  OracleCounter scratch;
  std::int64_t v = evaluate(inst.buyers[buyer], bundle, scratch);
  return Rat(v) - dot(prices, bundle);
}

Rat social_welfare(const MarketInstance& inst, const Allocation& alloc) {
  if (static_cast<int>(alloc.size()) != inst.m())
    throw DomainError("allocation must have one bundle per buyer");
  OracleCounter scratch;
  Rat sw = 0;
  for (int i = 0; i < inst.m(); ++i) {
    if (!alloc[i].within(inst.supply))
      throw DomainError("bundle of buyer " + buyer_label(i) + " exceeds supply bounds");
    sw += evaluate(inst.buyers[i], alloc[i], scratch);
  }
  return sw;
}

ValidityReport validate_allocation(const MarketInstance& inst, const Allocation& alloc) {
  ValidityReport r;
  if (static_cast<int>(alloc.size()) != inst.m()) {
    r.valid = false;
    r.first_violation_item = 0;
    r.supplied = inst.supply.empty() ? 0 : inst.supply[0];
    return r;
  }
  for (int j = 0; j < inst.n; ++j) {
    int demanded = 0;
    for (const Bundle& b : alloc) {
      if (static_cast<int>(b.quantities.size()) != inst.n) {
        r.valid = false;
        r.first_violation_item = j;
        r.supplied = inst.supply[j];
        return r;
      }
      demanded += b.quantities[j];
    }
    if (demanded != inst.supply[j]) {
      r.valid = false;
      r.first_violation_item = j;
      r.demanded = demanded;
      r.supplied = inst.supply[j];
      return r;
    }
  }
  return r;
}

std::int64_t magnitude_bound(const MarketInstance& inst) {
  std::int64_t best = 0;
  for (const ValuationSpec& spec : inst.buyers)
    best = std::max(best, value_magnitude(spec, inst.n, inst.supply));
  return best;
}

}  // namespace walrus
