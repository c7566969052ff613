#include "walrus/robust.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "walrus/ellipsoid.hpp"
#include "walrus/oracles.hpp"
#include "walrus/verify.hpp"

namespace walrus {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Difference-constraint view: constraint p_from - p_to <= w becomes a
// relaxation edge (to -> from).  Bellman-Ford from a super-source with the
// dummies pinned at zero yields feasible potentials.
struct DifferenceSystem {
  int nodes = 0;            // graph nodes + 1 (super-source is index `nodes - 1`)
  struct Edge {
    int tail, head;
    std::int64_t w;
  };
  std::vector<Edge> edges;

  // Returns distances, or nullopt when a negative cycle exists.
  std::optional<std::vector<std::int64_t>> solve() const {
    std::vector<std::int64_t> dist(nodes, kInf);
    dist[nodes - 1] = 0;
    for (int round = 0; round < nodes; ++round) {
      bool changed = false;
      for (const Edge& e : edges) {
        if (dist[e.tail] == kInf) continue;
        if (dist[e.tail] + e.w < dist[e.head]) {
          dist[e.head] = dist[e.tail] + e.w;
          changed = true;
        }
      }
      if (!changed) return dist;
    }
    return std::nullopt;
  }
};

}  // namespace

AllocationExchangeGraph build_allocation_exchange_graph(const MarketInstance& inst,
                                                        const Allocation& allocation) {
  inst.validate();
  if (!inst.single_unit())
    throw DomainError("allocation exchange graph requires a single-unit instance");
  ValidityReport validity = validate_allocation(inst, allocation);
  if (!validity.valid)
    throw DomainError("seeding allocation does not partition the items (item " +
                      item_label(validity.first_violation_item) + ")");

  AllocationExchangeGraph g;
  g.n = inst.n;
  g.m = inst.m();
  g.bundles.resize(g.m);
  OracleCounter scratch;
  std::vector<std::int64_t> base(g.m);
  for (int i = 0; i < g.m; ++i) {
    g.bundles[i] = allocation[i].to_mask();
    base[i] = evaluate_mask(inst.buyers[i], g.bundles[i], g.n, scratch);
  }

  const int n = g.n, m = g.m;
  auto add_arc = [&](int from, int to, std::int64_t w, int agent) {
    g.arcs.push_back({from, to, w, agent});
  };
  for (int i = 0; i < m; ++i) {
    const Mask s = g.bundles[i];
    const int dummy_i = n + i;
    // Real-real swaps and removals (swap against any foreign dummy).
    Mask held = s;
    while (held) {
      int j = std::countr_zero(held);
      held &= held - 1;
      for (int k = 0; k < n; ++k) {
        if (s >> k & 1u) continue;
        Mask swapped = (s | (Mask{1} << k)) & ~(Mask{1} << j);
        add_arc(j, k, base[i] - evaluate_mask(inst.buyers[i], swapped, n, scratch), i);
      }
      std::int64_t remove_w = base[i] - evaluate_mask(inst.buyers[i], s & ~(Mask{1} << j), n, scratch);
      for (int d = 0; d < m + 1; ++d)
        if (n + d != dummy_i) add_arc(j, n + d, remove_w, i);
    }
    // Additions: swap the own dummy in for a new item.
    for (int k = 0; k < n; ++k) {
      if (s >> k & 1u) continue;
      add_arc(dummy_i, k, base[i] - evaluate_mask(inst.buyers[i], s | (Mask{1} << k), n, scratch),
              i);
    }
    // Own dummy against every foreign dummy (vacuous weight-zero swaps; they
    // let cycles route through the dummy cluster).
    for (int d = 0; d < m + 1; ++d)
      if (n + d != dummy_i) add_arc(dummy_i, n + d, 0, i);
  }

  // No negative cycle iff the seeding allocation is optimal.
  DifferenceSystem sys;
  sys.nodes = g.nodes() + 1;
  for (const ExchangeArc& a : g.arcs) sys.edges.push_back({a.to, a.from, a.weight});
  for (int v = 0; v < g.nodes(); ++v) sys.edges.push_back({sys.nodes - 1, v, 0});
  if (!sys.solve())
    throw DomainError("exchange graph has a negative cycle: allocation not optimal");
  return g;
}

std::optional<ZeroCycle> detect_zero_weight_cycle(const AllocationExchangeGraph& graph) {
  DifferenceSystem sys;
  sys.nodes = graph.nodes() + 1;
  for (const ExchangeArc& a : graph.arcs) sys.edges.push_back({a.to, a.from, a.weight});
  for (int v = 0; v < graph.nodes(); ++v) sys.edges.push_back({sys.nodes - 1, v, 0});
  auto phi = sys.solve();
  if (!phi) throw DomainError("exchange graph has a negative cycle: allocation not optimal");

  // Tight subgraph: arcs whose reduced weight w + phi(to) - phi(from) is 0.
  // Every zero-weight cycle lies entirely inside it.
  const int V = graph.nodes();
  std::vector<std::vector<int>> tight(V);
  for (const ExchangeArc& a : graph.arcs)
    if (a.weight + (*phi)[a.to] - (*phi)[a.from] == 0) tight[a.from].push_back(a.to);
  for (auto& adj : tight) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }

  // Minimum-hop tight cycle through a real node (pure-dummy cycles witness
  // nothing: they shuffle empty slots).
  std::optional<ZeroCycle> best;
  for (int start = 0; start < graph.n; ++start) {
    std::vector<int> parent(V, -1), hops(V, -1);
    std::deque<int> queue;
    for (int to : tight[start]) {
      if (hops[to] != -1) continue;
      hops[to] = 1;
      parent[to] = start;
      queue.push_back(to);
    }
    bool closed = false;
    while (!queue.empty() && !closed) {
      int u = queue.front();
      queue.pop_front();
      for (int to : tight[u]) {
        if (to == start) {
          // Cycle found: start -> ... -> u -> start.
          std::vector<int> nodes;
          for (int x = u; x != start; x = parent[x]) nodes.push_back(x);
          nodes.push_back(start);
          std::reverse(nodes.begin(), nodes.end());
          if (!best || nodes.size() < best->nodes.size()) best = ZeroCycle{nodes};
          closed = true;
          break;
        }
        if (hops[to] == -1) {
          hops[to] = hops[u] + 1;
          parent[to] = u;
          queue.push_back(to);
        }
      }
    }
  }
  return best;
}

Allocation apply_cycle_swaps(const MarketInstance& inst, const AllocationExchangeGraph& graph,
                             const ZeroCycle& cycle) {
  std::vector<Mask> bundles = graph.bundles;
  std::vector<int> owner(graph.n, -1);
  for (int i = 0; i < graph.m; ++i) {
    Mask s = graph.bundles[i];
    while (s) {
      int j = std::countr_zero(s);
      s &= s - 1;
      owner[j] = i;
    }
  }
  const std::size_t len = cycle.nodes.size();
  for (std::size_t r = 0; r < len; ++r) {
    int j = cycle.nodes[r];
    int k = cycle.nodes[(r + 1) % len];
    // Agent holding the tail performs the swap.
    int agent;
    if (j < graph.n)
      agent = owner[j];
    else if (j < graph.n + graph.m)
      agent = j - graph.n;
    else
      throw DomainError("cycle leaves the free dummy, which owns nothing");
    if (agent < 0) throw DomainError("cycle traverses an unowned item");
    if (j < graph.n) bundles[agent] &= ~(Mask{1} << j);
    if (k < graph.n) bundles[agent] |= Mask{1} << k;
  }
  Allocation out;
  out.reserve(graph.m);
  for (int i = 0; i < graph.m; ++i) out.push_back(Bundle::from_mask(bundles[i], inst.n));
  return out;
}

RobustPriceReport compute_robust_prices(const MarketInstance& inst, const Allocation& allocation) {
  RobustPriceReport report;
  AllocationExchangeGraph graph = build_allocation_exchange_graph(inst, allocation);
  if (auto cycle = detect_zero_weight_cycle(graph)) {
    report.exists = false;
    report.cycle_witness = cycle;
    return report;
  }

  // Scale by 2n so the slack of 1/(2n) per real endpoint stays integral.
  const int n = graph.n;
  const std::int64_t scale = 2 * n;
  DifferenceSystem sys;
  sys.nodes = graph.nodes() + 1;
  for (const ExchangeArc& a : graph.arcs) {
    std::int64_t sigma = (a.from < n ? 1 : 0) + (a.to < n ? 1 : 0);
    sys.edges.push_back({a.to, a.from, scale * a.weight - sigma});
  }
  const int source = sys.nodes - 1;
  for (int d = n; d < graph.nodes(); ++d) {
    sys.edges.push_back({source, d, 0});
    sys.edges.push_back({d, source, 0});  // pin dummy potentials to zero
  }
  auto dist = sys.solve();
  if (!dist)
    throw DomainError("slack-augmented system infeasible despite zero-cycle freedom");

  report.exists = true;
  report.prices.resize(n);
  report.potential.resize(graph.nodes());
  for (int v = 0; v < graph.nodes(); ++v) report.potential[v] = Rat((*dist)[v], scale);
  for (int j = 0; j < n; ++j) report.prices[j] = Rat((*dist)[j], scale);

  // Contract checks: slack on every inequality and singleton demand sets.
  bool first = true;
  for (const ExchangeArc& a : graph.arcs) {
    Rat pf = a.from < n ? report.prices[a.from] : Rat(0);
    Rat pt = a.to < n ? report.prices[a.to] : Rat(0);
    Rat slack = Rat(a.weight) - (pf - pt);
    std::int64_t sigma = (a.from < n ? 1 : 0) + (a.to < n ? 1 : 0);
    if (slack * scale < sigma)
      throw DomainError("robust price construction violated its slack contract");
    if (sigma > 0 && (first || slack < report.slack)) {
      report.slack = slack;
      first = false;
    }
  }
  for (int i = 0; i < inst.m(); ++i) {
    DemandResult d = brute_force_demand(inst.buyers[i], inst.supply, report.prices);
    if (d.full_set->size() != 1 || (*d.full_set)[0].to_mask() != graph.bundles[i])
      throw DomainError("robust prices failed the unique-demand contract for buyer " +
                        buyer_label(i));
  }
  return report;
}

std::pair<MarketInstance, IsolationRecord> isolation_perturb(const MarketInstance& inst,
                                                             std::uint64_t seed) {
  inst.validate();
  if (!inst.single_unit()) throw DomainError("isolation perturbation requires single-unit");
  if (inst.n > 16) throw BudgetError("isolation perturbation materializes 2^n tables; n > 16");
  const int n = inst.n, m = inst.m();
  IsolationRecord record;
  record.N = 2ll * m * n * n * n;
  record.B = 2ll * n * record.N;
  record.w.assign(m, std::vector<std::int64_t>(n));
  SplitMix64 rng(seed ^ 0x1005017ULL);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) record.w[i][j] = rng.range(1, record.N);

  MarketInstance out;
  out.n = n;
  out.supply = inst.supply;
  OracleCounter scratch;
  for (int i = 0; i < m; ++i) {
    std::vector<std::int64_t> table(std::size_t{1} << n);
    for (Mask s = 0; s < table.size(); ++s) {
      std::int64_t v = record.B * evaluate_mask(inst.buyers[i], s, n, scratch);
      for (int j = 0; j < n; ++j)
        if (s >> j & 1u) v += record.w[i][j];
      table[s] = v;
    }
    out.buyers.push_back(ValuationSpec::make_subset_table(std::move(table)));
  }
  out.validate();
  return {std::move(out), std::move(record)};
}

Allocation recover_allocation_interior(const MarketInstance& inst,
                                       const PriceVector& interior_price) {
  OracleCounter scratch;
  AllGreedyResult ag = all_greedy(inst, interior_price, scratch);
  for (int j = 0; j < inst.n; ++j)
    if (ag.subgradient[j] != 0)
      throw DomainError(
          "price is not an interior minimizer (nonzero subgradient at item " + item_label(j) +
          "); continue optimizing or perturb");
  Allocation out;
  out.reserve(inst.m());
  for (int i = 0; i < inst.m(); ++i) out.push_back(Bundle::from_mask(ag.sets[i], inst.n));
  return out;
}

IsolationPipelineResult compute_allocation_via_isolation(const MarketInstance& inst,
                                                         std::uint64_t seed, int max_attempts) {
  IsolationPipelineResult result;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ++result.attempts;
    auto [perturbed, record] = isolation_perturb(inst, seed + 0x9E3779B97F4A7C15ULL * attempt);
    const std::int64_t big_m = std::max<std::int64_t>(magnitude_bound(perturbed), 1);
    OracleCounter counter;
    SingletonCache cache;
    SubgradientFn sub = [&](const PriceVector& p) {
      AllGreedyResult ag = all_greedy(perturbed, p, counter, &cache);
      std::vector<Rat> g(perturbed.n);
      for (int j = 0; j < perturbed.n; ++j) g[j] = Rat(ag.subgradient[j]);
      return g;
    };
    EllipsoidOptions opt;
    opt.box_bound = Rat(2 * big_m + 1);
    opt.max_iters = interior_query_budget(
        inst.n, 2.0 * static_cast<double>(big_m) * std::sqrt(static_cast<double>(inst.n)),
        1.0 / inst.n);
    EllipsoidOutcome out = ellipsoid_minimize(inst.n, sub, nullptr, opt);
    if (!out.zero_subgradient_point) continue;  // detected failure; retry
    AllGreedyResult ag = all_greedy(perturbed, *out.zero_subgradient_point, counter, &cache);
    result.success = true;
    result.interior_price = *out.zero_subgradient_point;
    result.gamma = ag.gamma;
    result.allocation.clear();
    result.allocation.reserve(inst.m());
    for (int i = 0; i < inst.m(); ++i)
      result.allocation.push_back(Bundle::from_mask(ag.sets[i], inst.n));
    return result;
  }
  return result;
}

}  // namespace walrus
