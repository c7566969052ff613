#pragma once

#include <cstdint>
#include <vector>

#include "walrus/rational.hpp"

namespace walrus {

// Item subsets on the single-unit path are bitmasks over [n], item 0 = bit 0.
using Mask = std::uint64_t;

// A multiset of items: quantities[j] units of item j.  On the single-unit
// path this is a 0/1 vector.
struct Bundle {
  std::vector<int> quantities;

  Bundle() = default;
  explicit Bundle(std::vector<int> q) : quantities(std::move(q)) {}

  static Bundle empty(int n) { return Bundle(std::vector<int>(n, 0)); }

  static Bundle from_mask(Mask mask, int n) {
    Bundle b = empty(n);
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) b.quantities[j] = 1;
    return b;
  }

  // Valid only when all quantities are 0/1.
  Mask to_mask() const {
    Mask m = 0;
    for (std::size_t j = 0; j < quantities.size(); ++j)
      if (quantities[j] != 0) m |= Mask{1} << j;
    return m;
  }

  bool is_subset_vector() const {
    for (int q : quantities)
      if (q != 0 && q != 1) return false;
    return true;
  }

  bool within(const std::vector<int>& supply) const {
    if (quantities.size() != supply.size()) return false;
    for (std::size_t j = 0; j < quantities.size(); ++j)
      if (quantities[j] < 0 || quantities[j] > supply[j]) return false;
    return true;
  }

  int total() const {
    int t = 0;
    for (int q : quantities) t += q;
    return t;
  }

  bool operator==(const Bundle& o) const { return quantities == o.quantities; }
  bool operator<(const Bundle& o) const { return quantities < o.quantities; }
};

// Exact per-item prices; the dual variable.  No sign restriction.
using PriceVector = std::vector<Rat>;

inline Rat dot(const PriceVector& p, const Bundle& x) {
  Rat r = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (x.quantities[j] != 0) r += p[j] * x.quantities[j];
  return r;
}

inline Rat mask_price(const PriceVector& p, Mask mask) {
  Rat r = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (mask >> j & 1u) r += p[j];
  return r;
}

}  // namespace walrus
