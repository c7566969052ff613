#include "walrus/valuation.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "walrus/market.hpp"

namespace walrus {

namespace {

std::size_t table_index(const std::vector<int>& radices, const Bundle& b) {
  std::size_t idx = 0, stride = 1;
  for (std::size_t j = 0; j < radices.size(); ++j) {
    idx += stride * static_cast<std::size_t>(b.quantities[j]);
    stride *= static_cast<std::size_t>(radices[j]);
  }
  return idx;
}

// Sum of the top-k weights among the masked items.
std::int64_t top_k_sum(const std::vector<std::int64_t>& w, Mask mask, int k) {
  std::vector<std::int64_t> present;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (mask >> j & 1u) present.push_back(w[j]);
  if (static_cast<int>(present.size()) > k) {
    std::partial_sort(present.begin(), present.begin() + k, present.end(),
                      std::greater<std::int64_t>());
    present.resize(k);
  }
  std::int64_t s = 0;
  for (std::int64_t x : present) s += std::max<std::int64_t>(x, 0);
  return s;
}

}  // namespace

ValuationSpec ValuationSpec::make_additive(std::vector<std::int64_t> w) {
  ValuationSpec s;
  s.kind = ValuationKind::additive;
  s.weights = std::move(w);
  return s;
}

ValuationSpec ValuationSpec::make_unit_demand(std::vector<std::int64_t> v) {
  ValuationSpec s;
  s.kind = ValuationKind::unit_demand;
  s.values = std::move(v);
  return s;
}

ValuationSpec ValuationSpec::make_uniform_matroid(int rank, std::vector<std::int64_t> w) {
  ValuationSpec s;
  s.kind = ValuationKind::weighted_matroid_rank;
  s.matroid.type = MatroidType::uniform;
  s.matroid.rank = rank;
  s.weights = std::move(w);
  return s;
}

ValuationSpec ValuationSpec::make_partition_matroid(std::vector<std::vector<int>> blocks,
                                                    std::vector<int> capacities,
                                                    std::vector<std::int64_t> w) {
  ValuationSpec s;
  s.kind = ValuationKind::weighted_matroid_rank;
  s.matroid.type = MatroidType::partition;
  s.matroid.blocks = std::move(blocks);
  s.matroid.capacities = std::move(capacities);
  s.weights = std::move(w);
  return s;
}

ValuationSpec ValuationSpec::make_table(std::vector<std::int64_t> table, std::vector<int> supply) {
  ValuationSpec s;
  s.kind = ValuationKind::explicit_table;
  s.table = std::move(table);
  s.radices.reserve(supply.size());
  for (int q : supply) s.radices.push_back(q + 1);
  return s;
}

ValuationSpec ValuationSpec::make_subset_table(std::vector<std::int64_t> by_mask) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < by_mask.size()) ++n;
  return make_table(std::move(by_mask), std::vector<int>(n, 1));
}

void ValuationSpec::validate(int n, const std::vector<int>& supply) const {
  auto expect_len = [&](std::size_t got, const char* what) {
    if (got != static_cast<std::size_t>(n))
      throw MalformedError(std::string(what) + " length does not match item count");
  };
  switch (kind) {
    case ValuationKind::additive:
      expect_len(weights.size(), "weights");
      break;
    case ValuationKind::unit_demand:
      expect_len(values.size(), "values");
      break;
    case ValuationKind::weighted_matroid_rank: {
      expect_len(weights.size(), "weights");
      if (matroid.type == MatroidType::uniform) {
        if (matroid.rank < 0) throw MalformedError("negative matroid rank");
      } else {
        if (matroid.blocks.size() != matroid.capacities.size())
          throw MalformedError("partition blocks and capacities disagree");
        std::vector<bool> seen(n, false);
        for (const auto& blk : matroid.blocks)
          for (int j : blk) {
            if (j < 0 || j >= n) throw MalformedError("partition block item out of range");
            if (seen[j]) throw MalformedError("partition blocks overlap");
            seen[j] = true;
          }
        for (int c : matroid.capacities)
          if (c < 0) throw MalformedError("negative partition capacity");
      }
      break;
    }
    case ValuationKind::explicit_table: {
      expect_len(radices.size(), "table radices");
      std::size_t want = 1;
      for (int j = 0; j < n; ++j) {
        if (radices[j] != supply[j] + 1)
          throw MalformedError("table domain does not match supply");
        want *= static_cast<std::size_t>(radices[j]);
      }
      if (table.size() != want) throw MalformedError("explicit table does not cover the domain");
      if (table[0] != 0) throw MalformedError("v(empty) must be 0");
      break;
    }
  }
}

std::int64_t evaluate(const ValuationSpec& spec, const Bundle& bundle, OracleCounter& counter) {
  ++counter.value_calls;
  switch (spec.kind) {
    case ValuationKind::additive: {
      std::int64_t v = 0;
      for (std::size_t j = 0; j < spec.weights.size(); ++j)
        v += spec.weights[j] * bundle.quantities[j];
      return v;
    }
    case ValuationKind::unit_demand: {
      bool any = false;
      std::int64_t v = 0;
      for (std::size_t j = 0; j < spec.values.size(); ++j)
        if (bundle.quantities[j] > 0) {
          v = any ? std::max(v, spec.values[j]) : spec.values[j];
          any = true;
        }
      return any ? v : 0;
    }
    case ValuationKind::weighted_matroid_rank: {
      Mask mask = 0;
      for (std::size_t j = 0; j < bundle.quantities.size(); ++j)
        if (bundle.quantities[j] > 0) mask |= Mask{1} << j;
      if (spec.matroid.type == MatroidType::uniform)
        return top_k_sum(spec.weights, mask, spec.matroid.rank);
      std::int64_t v = 0;
      for (std::size_t b = 0; b < spec.matroid.blocks.size(); ++b) {
        Mask blk = 0;
        for (int j : spec.matroid.blocks[b]) blk |= Mask{1} << j;
        v += top_k_sum(spec.weights, mask & blk, spec.matroid.capacities[b]);
      }
      return v;
    }
    case ValuationKind::explicit_table: {
      std::size_t idx = table_index(spec.radices, bundle);
      if (idx >= spec.table.size()) throw MalformedError("bundle outside explicit table domain");
      return spec.table[idx];
    }
  }
  throw DomainError("unknown valuation kind");
}

std::int64_t evaluate_mask(const ValuationSpec& spec, Mask mask, int n, OracleCounter& counter) {
  if (spec.kind == ValuationKind::explicit_table) {
    ++counter.value_calls;
    // Single-unit tables are indexed directly by mask.
    bool unit = true;
    for (int r : spec.radices)
      if (r != 2) unit = false;
    if (unit) return spec.table[mask];
    return evaluate(spec, Bundle::from_mask(mask, n), counter);
  }
  if (spec.kind == ValuationKind::additive) {
    ++counter.value_calls;
    std::int64_t v = 0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) v += spec.weights[j];
    return v;
  }
  if (spec.kind == ValuationKind::unit_demand) {
    ++counter.value_calls;
    bool any = false;
    std::int64_t v = 0;
    for (int j = 0; j < n; ++j)
      if (mask >> j & 1u) {
        v = any ? std::max(v, spec.values[j]) : spec.values[j];
        any = true;
      }
    return any ? v : 0;
  }
  return evaluate(spec, Bundle::from_mask(mask, n), counter);
}

std::int64_t value_magnitude(const ValuationSpec& spec, int n, const std::vector<int>& supply) {
  switch (spec.kind) {
    case ValuationKind::additive: {
      std::int64_t pos = 0, neg = 0;
      for (int j = 0; j < n; ++j) {
        std::int64_t w = spec.weights[j] * supply[j];
        if (w > 0) pos += w;
        if (w < 0) neg += -w;
      }
      return std::max(pos, neg);
    }
    case ValuationKind::unit_demand: {
      std::int64_t v = 0;
      for (std::int64_t x : spec.values) v = std::max(v, std::max(x, -x));
      return v;
    }
    case ValuationKind::weighted_matroid_rank: {
      OracleCounter scratch;
      Mask full = (Mask{1} << n) - 1;
      return std::max<std::int64_t>(evaluate_mask(spec, full, n, scratch), 0);
    }
    case ValuationKind::explicit_table: {
      std::int64_t v = 0;
      for (std::int64_t x : spec.table) v = std::max(v, std::max(x, -x));
      return v;
    }
  }
  return 0;
}

bool is_monotone(const ValuationSpec& spec, int n, const std::vector<int>& supply) {
  if (spec.kind != ValuationKind::explicit_table) {
    for (std::int64_t w : spec.weights)
      if (w < 0) return false;
    for (std::int64_t v : spec.values)
      if (v < 0) return false;
    return true;
  }
  OracleCounter scratch;
  std::vector<int> q(n, 0);
  for (;;) {
    Bundle b{q};
    std::int64_t base = evaluate(spec, b, scratch);
    for (int j = 0; j < n; ++j) {
      if (q[j] == supply[j]) continue;
      Bundle up = b;
      ++up.quantities[j];
      if (evaluate(spec, up, scratch) < base) return false;
    }
    int j = 0;
    while (j < n && q[j] == supply[j]) q[j++] = 0;
    if (j == n) return true;
    ++q[j];
  }
}

GsCheckResult check_gross_substitutes(const ValuationSpec& spec, int n) {
  if (n > 8)
    throw BudgetError("gross-substitutes check exceeds-check-limit: n = " + std::to_string(n) +
                      " > 8");
  // Weigh the n-subsets of a doubled ground set by the real items they carry;
  // the exchange inequality over that weighting is exact and finite.
  OracleCounter scratch;
  const int nn = 2 * n;
  const Mask real = (Mask{1} << n) - 1;
  std::vector<std::int64_t> vtab(std::size_t{1} << n);
  for (Mask s = 0; s < vtab.size(); ++s) vtab[s] = evaluate_mask(spec, s, n, scratch);
  auto omega = [&](Mask basis) { return vtab[basis & real]; };

  std::vector<Mask> bases;
  Mask first = (Mask{1} << n) - 1;
  Mask limit = Mask{1} << nn;
  for (Mask b = first; b < limit;) {
    bases.push_back(b);
    Mask c = b & (~b + 1);
    Mask r = b + c;
    b = (((r ^ b) >> 2) / c) | r;  // Gosper's hack
    if (c == 0) break;
  }

  for (Mask b1 : bases) {
    for (Mask b2 : bases) {
      Mask only1 = b1 & ~b2;
      if (only1 == 0) continue;
      for (int u = 0; u < nn; ++u) {
        if (!(only1 >> u & 1u)) continue;
        bool ok = false;
        Mask only2 = b2 & ~b1;
        for (int w = 0; w < nn && !ok; ++w) {
          if (!(only2 >> w & 1u)) continue;
          Mask b1s = (b1 & ~(Mask{1} << u)) | (Mask{1} << w);
          Mask b2s = (b2 & ~(Mask{1} << w)) | (Mask{1} << u);
          if (omega(b1) + omega(b2) <= omega(b1s) + omega(b2s)) ok = true;
        }
        if (!ok) {
          GsCheckResult r;
          r.is_gs = false;
          r.violation = GsViolation{b1, b2, u};
          return r;
        }
      }
    }
  }
  return GsCheckResult{true, std::nullopt};
}

namespace {

ValuationSpec random_matroid_rank(SplitMix64& rng, int n, std::int64_t max_value) {
  std::vector<std::int64_t> w(n);
  for (auto& x : w) x = rng.range(0, max_value);
  if (rng.below(2) == 0) {
    int rank = static_cast<int>(rng.range(1, n));
    return ValuationSpec::make_uniform_matroid(rank, std::move(w));
  }
  // Random partition into up to three blocks with random capacities.
  int nblocks = static_cast<int>(rng.range(1, std::min(n, 3)));
  std::vector<std::vector<int>> blocks(nblocks);
  for (int j = 0; j < n; ++j) blocks[rng.below(nblocks)].push_back(j);
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                              [](const auto& b) { return b.empty(); }),
               blocks.end());
  std::vector<int> caps;
  caps.reserve(blocks.size());
  for (const auto& b : blocks) caps.push_back(static_cast<int>(rng.range(1, b.size())));
  return ValuationSpec::make_partition_matroid(std::move(blocks), std::move(caps), std::move(w));
}

}  // namespace

MarketInstance generate_random_gs(GsFamily family, int n, int m, std::int64_t max_value,
                                  std::uint64_t seed) {
  SplitMix64 rng(seed ^ (0xA5A5A5A5ULL + static_cast<std::uint64_t>(family) * 0x1234567ULL));
  MarketInstance inst;
  inst.n = n;
  inst.supply.assign(n, 1);
  for (int i = 0; i < m; ++i) {
    switch (family) {
      case GsFamily::additive: {
        std::vector<std::int64_t> w(n);
        for (auto& x : w) x = rng.range(0, max_value);
        inst.buyers.push_back(ValuationSpec::make_additive(std::move(w)));
        break;
      }
      case GsFamily::unit_demand: {
        std::vector<std::int64_t> v(n);
        for (auto& x : v) x = rng.range(0, max_value);
        inst.buyers.push_back(ValuationSpec::make_unit_demand(std::move(v)));
        break;
      }
      case GsFamily::matroid_rank_mix: {
        switch (rng.below(4)) {
          case 0: {
            std::vector<std::int64_t> w(n);
            for (auto& x : w) x = rng.range(0, max_value);
            inst.buyers.push_back(ValuationSpec::make_additive(std::move(w)));
            break;
          }
          case 1: {
            std::vector<std::int64_t> v(n);
            for (auto& x : v) x = rng.range(0, max_value);
            inst.buyers.push_back(ValuationSpec::make_unit_demand(std::move(v)));
            break;
          }
          default:
            inst.buyers.push_back(random_matroid_rank(rng, n, max_value));
        }
        break;
      }
    }
  }
  inst.validate();
  return inst;
}

MarketInstance generate_random_general(int n, int m, std::int64_t max_value, int max_supply,
                                       std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0xFEEDULL);
  MarketInstance inst;
  inst.n = n;
  inst.supply.resize(n);
  for (int j = 0; j < n; ++j) inst.supply[j] = static_cast<int>(rng.range(1, max_supply));
  std::size_t domain = 1;
  for (int j = 0; j < n; ++j) domain *= static_cast<std::size_t>(inst.supply[j] + 1);
  for (int i = 0; i < m; ++i) {
    std::vector<std::int64_t> table(domain);
    for (std::size_t k = 1; k < domain; ++k) table[k] = rng.range(0, max_value);
    inst.buyers.push_back(ValuationSpec::make_table(std::move(table), inst.supply));
  }
  inst.validate();
  return inst;
}

}  // namespace walrus
