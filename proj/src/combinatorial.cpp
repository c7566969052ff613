#include "walrus/combinatorial.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>

namespace walrus {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct LexDist {
  std::int64_t weight = kInf;
  int hops = 0;

  bool operator<(const LexDist& o) const {
    if (weight != o.weight) return weight < o.weight;
    return hops < o.hops;
  }
  LexDist plus(std::int64_t w) const { return {weight + w, hops + 1}; }
};

struct Solver {
  const MarketInstance& inst;
  OracleCounter& counter;
  int n, m;

  std::vector<Mask> bundle;  // per buyer
  std::vector<std::int64_t> bundle_value;
  std::vector<int> owner;  // per item, -1 = unowned
  std::vector<std::int64_t> price;
  std::vector<bool> active;
  std::vector<bool> inserted;
  std::vector<int> inserted_items;  // ascending item ids

  // Singleton values with per-item lists over inactive buyers, sorted by
  // value descending then buyer ascending; heads skip activated buyers.
  std::vector<std::int64_t> singleton;  // i * n + j
  std::vector<std::vector<int>> list;
  std::vector<std::size_t> list_head;

  Solver(const MarketInstance& mi, OracleCounter& c) : inst(mi), counter(c), n(mi.n), m(mi.m()) {
    bundle.assign(m, 0);
    bundle_value.assign(m, 0);
    owner.assign(n, -1);
    price.assign(n, 0);
    active.assign(m, false);
    inserted.assign(n, false);
  }

  std::int64_t val(int i, Mask s) { return evaluate_mask(inst.buyers[i], s, n, counter); }

  void build_singleton_lists() {
    singleton.resize(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        singleton[static_cast<std::size_t>(i) * n + j] = val(i, Mask{1} << j);
    list.assign(n, {});
    list_head.assign(n, 0);
    for (int j = 0; j < n; ++j) {
      list[j].resize(m);
      std::iota(list[j].begin(), list[j].end(), 0);
      std::stable_sort(list[j].begin(), list[j].end(), [&](int a, int b) {
        std::int64_t va = singleton[static_cast<std::size_t>(a) * n + j];
        std::int64_t vb = singleton[static_cast<std::size_t>(b) * n + j];
        if (va != vb) return va > vb;
        return a < b;
      });
    }
  }

  // Largest v_i({j}) among still-inactive buyers.
  std::optional<std::pair<std::int64_t, int>> inactive_best(int j) {
    auto& head = list_head[j];
    while (head < list[j].size() && active[list[j][head]]) ++head;
    if (head == list[j].size()) return std::nullopt;
    int i = list[j][head];
    return std::make_pair(singleton[static_cast<std::size_t>(i) * n + j], i);
  }

  // w(phi, j) = p_j + min_i [v_i(S_i) - v_i(S_i + j)] over buyers without j,
  // ties to the lowest buyer index.  Active buyers are scanned; the inactive
  // minimum is the head of L_j.
  std::optional<std::pair<std::int64_t, int>> phi_arc(int j) {
    std::optional<std::pair<std::int64_t, int>> best;  // (delta, buyer)
    auto offer = [&](std::int64_t delta, int buyer) {
      if (!best || delta < best->first || (delta == best->first && buyer < best->second))
        best = std::make_pair(delta, buyer);
    };
    for (int i = 0; i < m; ++i) {
      if (!active[i] || (bundle[i] >> j & 1u)) continue;
      offer(bundle_value[i] - val(i, bundle[i] | (Mask{1} << j)), i);
    }
    if (auto top = inactive_best(j)) offer(-top->first, top->second);
    if (!best) return std::nullopt;
    return std::make_pair(best->first + price[j], best->second);
  }

  // p_k large enough that every arc touching k starts non-negative: it must
  // dominate the add gain v_i(S_i + k) - v_i(S_i) of every buyer and the
  // swap gain v_i(S_i + k - t) - v_i(S_i) + p_t of every owned item t.
  std::int64_t init_phase_price(int k) {
    bool found = false;
    std::int64_t best = 0;
    auto consider = [&](std::int64_t x) {
      if (!found || x > best) best = x;
      found = true;
    };
    for (int i = 0; i < m; ++i) {
      if (!active[i]) continue;
      consider(val(i, bundle[i] | (Mask{1} << k)) - bundle_value[i]);
      Mask s = bundle[i];
      while (s) {
        int t = std::countr_zero(s);
        s &= s - 1;
        consider(val(i, (bundle[i] | (Mask{1} << k)) & ~(Mask{1} << t)) - bundle_value[i] +
                 price[t]);
      }
    }
    if (auto top = inactive_best(k)) consider(top->first);
    if (!found) throw DomainError("no buyer available to price the new item");
    return best;
  }

  struct Augmentation {
    std::vector<int> path;           // item sequence after phi
    std::vector<std::int64_t> dist;  // truncated d(j), indexed by item
    int phi_buyer = -1;              // buyer granted the first path item
  };

  Augmentation shortest_augmentation(int k) {
    std::vector<LexDist> dist(n);
    std::vector<int> parent(n, -2);  // -2 unreached, -1 phi
    std::vector<int> phi_buyer_for(n, -1);
    std::vector<bool> done(n, false);

    struct Arc {
      int to;
      std::int64_t w;
    };
    std::vector<std::vector<Arc>> arcs(n);
    for (int t : inserted_items) {
      if (owner[t] < 0) continue;
      int i = owner[t];
      for (int j : inserted_items) {
        if (j == t || (bundle[i] >> j & 1u)) continue;
        Mask swapped = (bundle[i] | (Mask{1} << j)) & ~(Mask{1} << t);
        std::int64_t w = bundle_value[i] - val(i, swapped) + price[j] - price[t];
        if (w < 0)
          throw DomainError("negative exchange-arc weight; valuation is not gross substitutes");
        arcs[t].push_back({j, w});
      }
    }
    for (int j : inserted_items) {
      if (auto pa = phi_arc(j)) {
        if (pa->first < 0)
          throw DomainError("negative phi-arc weight; valuation is not gross substitutes");
        dist[j] = {pa->first, 1};
        parent[j] = -1;
        phi_buyer_for[j] = pa->second;
      }
    }

    for (std::size_t round = 0; round < inserted_items.size(); ++round) {
      int u = -1;
      for (int j : inserted_items)
        if (!done[j] && parent[j] != -2 && (u < 0 || dist[j] < dist[u])) u = j;
      if (u < 0) break;
      done[u] = true;
      if (u == k) break;
      for (const Arc& a : arcs[u]) {
        LexDist cand = dist[u].plus(a.w);
        if (parent[a.to] == -2 || cand < dist[a.to]) {
          dist[a.to] = cand;
          parent[a.to] = u;
        }
      }
    }
    if (parent[k] == -2)
      throw DomainError("new item unreachable from phi; exchange graph invariant broken");

    Augmentation aug;
    std::int64_t dk = dist[k].weight;
    aug.dist.assign(n, 0);
    for (int j : inserted_items)
      aug.dist[j] = (parent[j] == -2) ? dk : std::min(dist[j].weight, dk);
    std::vector<int> rev;
    for (int u = k; u != -1; u = parent[u]) rev.push_back(u);
    aug.path.assign(rev.rbegin(), rev.rend());
    aug.phi_buyer = phi_buyer_for[aug.path.front()];
    return aug;
  }

  void apply_augmentation(const Augmentation& aug) {
    struct Move {
      int buyer;
      int gain;
      int lose;  // -1 for the phi grant
    };
    std::vector<Move> moves;
    moves.push_back({aug.phi_buyer, aug.path.front(), -1});
    for (std::size_t r = 0; r + 1 < aug.path.size(); ++r) {
      int t = aug.path[r], j = aug.path[r + 1];
      if (owner[t] < 0) throw DomainError("augmenting path traverses an unowned item");
      moves.push_back({owner[t], j, t});
    }
    for (const Move& mv : moves) {
      if (mv.lose >= 0) bundle[mv.buyer] &= ~(Mask{1} << mv.lose);
      bundle[mv.buyer] |= Mask{1} << mv.gain;
      owner[mv.gain] = mv.buyer;
    }
    std::vector<int> touched;
    for (const Move& mv : moves) touched.push_back(mv.buyer);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int i : touched) bundle_value[i] = val(i, bundle[i]);
    active[aug.phi_buyer] = true;
    for (int j : inserted_items) price[j] -= aug.dist[j];

    Mask seen = 0, want = 0;
    for (int i = 0; i < m; ++i) {
      if ((seen & bundle[i]) != 0) throw DomainError("augmentation produced overlapping bundles");
      seen |= bundle[i];
    }
    for (int j : inserted_items) want |= Mask{1} << j;
    if (seen != want) throw DomainError("augmentation did not cover the inserted items");
  }

  void check_certificate(int phase) {
    for (int i = 0; i < m; ++i) {
      if (!active[i]) {
        for (int j : inserted_items)
          if (singleton[static_cast<std::size_t>(i) * n + j] > price[j])
            fail(phase, "Add", i, j);
        continue;
      }
      for (int j : inserted_items) {
        if (bundle[i] >> j & 1u) {
          std::int64_t without = val(i, bundle[i] & ~(Mask{1} << j));
          if (without + price[j] > bundle_value[i]) fail(phase, "Remove", i, j);
        } else {
          if (val(i, bundle[i] | (Mask{1} << j)) - price[j] > bundle_value[i])
            fail(phase, "Add", i, j);
          Mask s = bundle[i];
          while (s) {
            int t = std::countr_zero(s);
            s &= s - 1;
            std::int64_t swapped = val(i, (bundle[i] | (Mask{1} << j)) & ~(Mask{1} << t));
            if (swapped - price[j] + price[t] > bundle_value[i]) fail(phase, "Swap", i, j);
          }
        }
      }
    }
  }

  [[noreturn]] void fail(int phase, const char* condition, int buyer, int item) {
    throw DomainError("phase " + std::to_string(phase) + ": condition (" + condition +
                      ") violated for buyer " + buyer_label(buyer) + ", item " +
                      item_label(item) + "; valuation is not gross substitutes");
  }
};

}  // namespace

SolveReport solve_welfare_incremental(const MarketInstance& inst, OracleCounter& counter,
                                      const CombinatorialOptions& options) {
  inst.validate();
  if (!inst.single_unit())
    throw DomainError("combinatorial solver requires a single-unit instance");
  for (int i = 0; i < inst.m(); ++i)
    if (!is_monotone(inst.buyers[i], inst.n, inst.supply))
      throw DomainError("buyer " + buyer_label(i) +
                        " has a non-monotone valuation; combinatorial solver requires "
                        "monotone valuations");

  Solver solver(inst, counter);
  std::vector<int> order(inst.n);
  std::iota(order.begin(), order.end(), 0);
  if (options.random_order) {
    SplitMix64 rng(options.order_seed ^ 0xC0FFEEULL);
    for (int j = inst.n - 1; j > 0; --j)
      std::swap(order[j], order[rng.below(static_cast<std::uint64_t>(j) + 1)]);
  }

  std::uint64_t calls_before = counter.value_calls;
  solver.build_singleton_lists();
  for (int phase = 0; phase < inst.n; ++phase) {
    int k = order[phase];
    solver.price[k] = solver.init_phase_price(k);
    solver.inserted[k] = true;
    solver.inserted_items.insert(
        std::upper_bound(solver.inserted_items.begin(), solver.inserted_items.end(), k), k);
    auto aug = solver.shortest_augmentation(k);
    solver.apply_augmentation(aug);
    solver.check_certificate(phase + 1);
    if (options.trace != nullptr) {
      PhaseTrace t;
      t.phase = phase + 1;
      t.item = k + 1;
      t.path.push_back(0);
      for (int u : aug.path) t.path.push_back(u + 1);
      for (int j : solver.inserted_items) {
        t.distance_item.push_back(j + 1);
        t.distance.push_back(aug.dist[j]);
      }
      options.trace->push_back(t);
    }
    if (options.per_phase_value_calls != nullptr) {
      options.per_phase_value_calls->push_back(counter.value_calls - calls_before);
      calls_before = counter.value_calls;
    }
  }

  SolveReport report;
  report.method = "combinatorial";
  report.verdict = SolveVerdict::equilibrium;
  report.prices.resize(inst.n);
  for (int j = 0; j < inst.n; ++j) report.prices[j] = Rat(solver.price[j]);
  EquilibriumCertificate cert;
  cert.prices = report.prices;
  cert.allocation.reserve(inst.m());
  Rat welfare = 0;
  for (int i = 0; i < inst.m(); ++i) {
    cert.allocation.push_back(Bundle::from_mask(solver.bundle[i], inst.n));
    welfare += solver.bundle_value[i];
    BuyerWitness w;
    w.kind = WitnessKind::local_conditions;
    w.utility = Rat(solver.bundle_value[i]) - mask_price(report.prices, solver.bundle[i]);
    cert.witnesses.push_back(w);
  }
  cert.oracle_calls = counter;
  report.certificate = std::move(cert);
  report.welfare = welfare;
  report.iterations = static_cast<std::uint64_t>(inst.n);
  report.oracle_calls = counter;
  return report;
}

}  // namespace walrus
