#include "walrus/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "walrus/oracles.hpp"

namespace walrus {

std::uint64_t verify_budget() {
  if (const char* env = std::getenv("WALRUS_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw MalformedError("WALRUS_BUDGET must be a positive integer");
  }
  return std::uint64_t{1} << 22;
}

namespace {

// Distributions of s units over m buyers, in lexicographic order.
void compositions(int s, int m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (m == 1) {
    cur.push_back(s);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= s; ++a) {
    cur.push_back(a);
    compositions(s - a, m - 1, cur, out);
    cur.pop_back();
  }
}

std::uint64_t composition_count(int s, int m) {
  // C(s + m - 1, m - 1)
  std::uint64_t r = 1;
  for (int k = 1; k < m; ++k) {
    r = r * static_cast<std::uint64_t>(s + k) / static_cast<std::uint64_t>(k);
    if (r > (std::uint64_t{1} << 40)) return r;  // already hopeless
  }
  return r;
}

}  // namespace

WelfareResult brute_force_welfare(const MarketInstance& inst) {
  const int n = inst.n, m = inst.m();
  const std::uint64_t budget = verify_budget();
  std::uint64_t total = 1;
  for (int j = 0; j < n; ++j) {
    std::uint64_t c = composition_count(inst.supply[j], m);
    if (total > budget / std::max<std::uint64_t>(c, 1))
      throw BudgetError("welfare enumeration exceeds budget of " + std::to_string(budget) +
                        " partitions");
    total *= c;
  }
  if (total > budget)
    throw BudgetError("welfare enumeration exceeds budget of " + std::to_string(budget) +
                      " partitions");

  // Per-item distributions, enumerated once each.
  std::vector<std::vector<std::vector<int>>> per_item(n);
  for (int j = 0; j < n; ++j) {
    std::vector<int> cur;
    compositions(inst.supply[j], m, cur, per_item[j]);
  }

  WelfareResult res;
  OracleCounter scratch;
  std::vector<std::size_t> pick(n, 0);
  std::vector<Bundle> bundles(m, Bundle::empty(n));
  bool first = true;
  for (;;) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) bundles[i].quantities[j] = per_item[j][pick[j]][i];
    Rat sw = 0;
    for (int i = 0; i < m; ++i) sw += evaluate(inst.buyers[i], bundles[i], scratch);
    ++res.enumerated;
    if (first || sw > res.value) {
      res.value = sw;
      res.optima.clear();
      res.optima.push_back(bundles);
      res.optimum_count = 1;
      res.capped = false;
      first = false;
    } else if (sw == res.value) {
      ++res.optimum_count;
      if (res.optima.size() < WelfareResult::optima_cap)
        res.optima.push_back(bundles);
      else
        res.capped = true;
    }
    int j = n - 1;
    while (j >= 0 && pick[j] + 1 == per_item[j].size()) pick[j--] = 0;
    if (j < 0) break;
    ++pick[j];
  }
  return res;
}

namespace {

struct CoverSearch {
  const MarketInstance& inst;
  const std::vector<std::vector<Bundle>>& demand_sets;
  std::uint64_t budget;
  std::uint64_t visited = 0;
  std::map<std::pair<int, std::vector<int>>, bool> memo;
  std::vector<const Bundle*> chosen;

  bool run(int buyer, std::vector<int>& remaining) {
    if (buyer == inst.m()) {
      for (int r : remaining)
        if (r != 0) return false;
      return true;
    }
    if (++visited > budget)
      throw BudgetError("clearing-selection search exceeds budget of " + std::to_string(budget));
    auto key = std::make_pair(buyer, remaining);
    auto it = memo.find(key);
    if (it != memo.end() && !it->second) return false;
    for (const Bundle& x : demand_sets[buyer]) {
      bool fits = true;
      for (int j = 0; j < inst.n && fits; ++j)
        if (x.quantities[j] > remaining[j]) fits = false;
      if (!fits) continue;
      for (int j = 0; j < inst.n; ++j) remaining[j] -= x.quantities[j];
      chosen[buyer] = &x;
      if (run(buyer + 1, remaining)) return true;
      for (int j = 0; j < inst.n; ++j) remaining[j] += x.quantities[j];
    }
    memo[key] = false;
    return false;
  }
};

}  // namespace

MembershipVerdict walrasian_membership(const MarketInstance& inst, const PriceVector& prices,
                                       const Allocation* allocation) {
  MembershipVerdict v;
  if (allocation != nullptr) {
    ValidityReport validity = validate_allocation(inst, *allocation);
    if (!validity.valid) {
      v.member = false;
      v.failing_item = validity.first_violation_item;
      v.reason = "allocation does not clear item " + item_label(validity.first_violation_item) +
                 " (demand " + std::to_string(validity.demanded) + ", supply " +
                 std::to_string(validity.supplied) + ")";
      return v;
    }
    for (int i = 0; i < inst.m(); ++i) {
      DemandResult d = brute_force_demand(inst.buyers[i], inst.supply, prices);
      Rat u = utility_of_bundle(inst, i, (*allocation)[i], prices);
      if (u != d.utility) {
        v.member = false;
        v.failing_buyer = i;
        v.reason = "buyer " + buyer_label(i) + " bundle utility " + rat_to_string(u) +
                   " below demand optimum " + rat_to_string(d.utility);
        return v;
      }
    }
    v.member = true;
    v.clearing = *allocation;
    return v;
  }

  std::vector<std::vector<Bundle>> demand_sets(inst.m());
  for (int i = 0; i < inst.m(); ++i) {
    DemandResult d = brute_force_demand(inst.buyers[i], inst.supply, prices);
    demand_sets[i] = std::move(*d.full_set);
  }
  CoverSearch search{inst, demand_sets, verify_budget(), 0, {}, {}};
  search.chosen.resize(inst.m(), nullptr);
  std::vector<int> remaining = inst.supply;
  if (search.run(0, remaining)) {
    v.member = true;
    Allocation alloc;
    alloc.reserve(inst.m());
    for (const Bundle* b : search.chosen) alloc.push_back(*b);
    v.clearing = std::move(alloc);
  } else {
    v.member = false;
    v.reason = "no selection from the demand sets clears the market";
  }
  return v;
}

namespace {

// Integer-price fast path used by the box scan.
bool membership_int(const MarketInstance& inst, const std::vector<std::int64_t>& prices,
                    std::uint64_t budget) {
  const int n = inst.n, m = inst.m();
  OracleCounter scratch;
  std::vector<std::vector<Bundle>> demand_sets(m);
  if (inst.single_unit()) {
    for (int i = 0; i < m; ++i) {
      std::int64_t best = 0;
      bool first = true;
      std::vector<Mask> argmax;
      for (Mask s = 0; s < (Mask{1} << n); ++s) {
        std::int64_t u = evaluate_mask(inst.buyers[i], s, n, scratch);
        for (int j = 0; j < n; ++j)
          if (s >> j & 1u) u -= prices[j];
        if (first || u > best) {
          best = u;
          argmax.assign(1, s);
          first = false;
        } else if (u == best) {
          argmax.push_back(s);
        }
      }
      demand_sets[i].reserve(argmax.size());
      for (Mask s : argmax) demand_sets[i].push_back(Bundle::from_mask(s, n));
    }
  } else {
    for (int i = 0; i < m; ++i) {
      std::vector<int> q(n, 0);
      std::int64_t best = 0;
      bool first = true;
      for (;;) {
        Bundle b{q};
        std::int64_t u = evaluate(inst.buyers[i], b, scratch);
        for (int j = 0; j < n; ++j) u -= prices[j] * q[j];
        if (first || u > best) {
          best = u;
          demand_sets[i].assign(1, b);
          first = false;
        } else if (u == best) {
          demand_sets[i].push_back(b);
        }
        int j = n - 1;
        while (j >= 0 && q[j] == inst.supply[j]) q[j--] = 0;
        if (j < 0) break;
        ++q[j];
      }
    }
  }
  CoverSearch search{inst, demand_sets, budget, 0, {}, {}};
  search.chosen.resize(m, nullptr);
  std::vector<int> remaining = inst.supply;
  return search.run(0, remaining);
}

}  // namespace

WalrasianSet enumerate_integral_walrasian(const MarketInstance& inst) {
  const int n = inst.n;
  const std::int64_t M = magnitude_bound(inst);
  const std::uint64_t budget = verify_budget();
  const std::uint64_t side = static_cast<std::uint64_t>(4 * M + 1);
  std::uint64_t points = 1;
  for (int j = 0; j < n; ++j) {
    if (points > budget / side)
      throw BudgetError("integral price scan exceeds budget of " + std::to_string(budget) +
                        " points");
    points *= side;
  }

  WalrasianSet set;
  std::vector<std::int64_t> p(n, -2 * M);
  for (;;) {
    if (membership_int(inst, p, budget)) set.integral_points.push_back(p);
    int j = n - 1;
    while (j >= 0 && p[j] == 2 * M) p[j--] = -2 * M;
    if (j < 0) break;
    ++p[j];
  }
  set.exists = !set.integral_points.empty();
  if (set.exists) {
    std::vector<std::int64_t> lo = set.integral_points.front();
    std::vector<std::int64_t> hi = lo;
    for (const auto& q : set.integral_points)
      for (int j = 0; j < n; ++j) {
        lo[j] = std::min(lo[j], q[j]);
        hi[j] = std::max(hi[j], q[j]);
      }
    set.lattice_min = lo;
    set.lattice_max = hi;
  }
  return set;
}

TheoremVerdict check_welfare_theorems(const MarketInstance& inst,
                                      const EquilibriumCertificate& cert) {
  TheoremVerdict verdict;
  WelfareResult wf = brute_force_welfare(inst);
  Rat sw = social_welfare(inst, cert.allocation);
  if (sw != wf.value) {
    verdict.pass = false;
    verdict.detail = "certified welfare " + rat_to_string(sw) + " differs from optimum " +
                     rat_to_string(wf.value);
    return verdict;
  }
  // Every optimal allocation must be supported by the certified prices.
  std::vector<Rat> max_utility(inst.m());
  for (int i = 0; i < inst.m(); ++i)
    max_utility[i] = brute_force_demand(inst.buyers[i], inst.supply, cert.prices).utility;
  for (const Allocation& opt : wf.optima) {
    for (int i = 0; i < inst.m(); ++i) {
      Rat u = utility_of_bundle(inst, i, opt[i], cert.prices);
      if (u != max_utility[i]) {
        verdict.pass = false;
        verdict.detail = "optimal allocation not supported at certified prices for buyer " +
                         buyer_label(i);
        return verdict;
      }
    }
  }
  return verdict;
}

namespace {

// Two-phase primal simplex with Bland's rule, exact rational arithmetic.
// Maximizes c.z subject to A z = b, z >= 0; requires b >= 0.
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rat>> a, std::vector<Rat> b, std::vector<Rat> c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  Rat solve() {
    const std::size_t rows = a_.size();
    const std::size_t cols = c_.size();
    // Phase 1: artificial basis.
    std::size_t total = cols + rows;
    tableau_.assign(rows + 1, std::vector<Rat>(total + 1));
    basis_.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < cols; ++j) tableau_[r][j] = a_[r][j];
      tableau_[r][cols + r] = 1;
      tableau_[r][total] = b_[r];
      basis_[r] = cols + r;
    }
    // Phase-1 objective: minimize sum of artificials.
    for (std::size_t j = 0; j <= total; ++j) {
      Rat s = 0;
      for (std::size_t r = 0; r < rows; ++r) s += tableau_[r][j];
      tableau_[rows][j] = s;
    }
    for (std::size_t r = 0; r < rows; ++r) tableau_[rows][cols + r] = 0;
    run_phase(cols, total);  // artificials never re-enter: candidates stop at cols

    if (tableau_[rows][total] != 0) throw DomainError("relaxation infeasible");
    // Drive leftover artificials out of the basis where possible.
    for (std::size_t r = 0; r < rows; ++r) {
      if (basis_[r] < cols) continue;
      bool pivoted = false;
      for (std::size_t j = 0; j < cols && !pivoted; ++j)
        if (tableau_[r][j] != 0) {
          pivot(r, j, total);
          pivoted = true;
        }
      // A row with no eligible pivot is redundant; its artificial stays at 0.
    }
    // Phase 2 objective row: reduced costs of -c for minimization of -c.z.
    for (std::size_t j = 0; j <= total; ++j) tableau_[rows][j] = 0;
    for (std::size_t j = 0; j < cols; ++j) tableau_[rows][j] = c_[j];
    for (std::size_t r = 0; r < rows; ++r) {
      if (basis_[r] < cols && c_[basis_[r]] != 0) {
        Rat coef = c_[basis_[r]];
        for (std::size_t j = 0; j <= total; ++j) tableau_[rows][j] -= coef * tableau_[r][j];
      }
    }
    run_phase(cols, total);
    return -tableau_[rows][total];
  }

 private:
  void run_phase(std::size_t cols, std::size_t total) {
    const std::size_t rows = a_.size();
    for (;;) {
      // Bland: smallest index with positive reduced cost.
      std::size_t enter = total;
      for (std::size_t j = 0; j < cols; ++j)
        if (tableau_[rows][j] > 0) {
          enter = j;
          break;
        }
      if (enter == total) return;
      std::size_t leave = rows;
      Rat best_ratio;
      for (std::size_t r = 0; r < rows; ++r) {
        if (tableau_[r][enter] <= 0) continue;
        Rat ratio = tableau_[r][total] / tableau_[r][enter];
        if (leave == rows || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows) throw DomainError("relaxation unbounded");
      pivot(leave, enter, total);
    }
  }

  void pivot(std::size_t row, std::size_t col, std::size_t total) {
    const std::size_t rows = a_.size();
    Rat inv = tableau_[row][col];
    for (std::size_t j = 0; j <= total; ++j) tableau_[row][j] /= inv;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == row || tableau_[r][col] == 0) continue;
      Rat coef = tableau_[r][col];
      for (std::size_t j = 0; j <= total; ++j) tableau_[r][j] -= coef * tableau_[row][j];
    }
    basis_[row] = col;
  }

  std::vector<std::vector<Rat>> a_;
  std::vector<Rat> b_;
  std::vector<Rat> c_;
  std::vector<std::vector<Rat>> tableau_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Rat configuration_lp_value(const MarketInstance& inst) {
  const int n = inst.n, m = inst.m();
  std::uint64_t domain = 1;
  for (int j = 0; j < n; ++j) {
    domain *= static_cast<std::uint64_t>(inst.supply[j] + 1);
    if (domain > 4096) throw BudgetError("relaxation exceeds 4096 bundles per buyer");
  }
  // Enumerate the bundle domain once.
  std::vector<Bundle> bundles;
  std::vector<int> q(n, 0);
  for (;;) {
    bundles.push_back(Bundle{q});
    int j = n - 1;
    while (j >= 0 && q[j] == inst.supply[j]) q[j--] = 0;
    if (j < 0) break;
    ++q[j];
  }
  const std::size_t d = bundles.size();
  const std::size_t cols = static_cast<std::size_t>(m) * d;
  std::vector<std::vector<Rat>> a(static_cast<std::size_t>(m + n), std::vector<Rat>(cols, Rat(0)));
  std::vector<Rat> b(static_cast<std::size_t>(m + n));
  std::vector<Rat> c(cols);
  OracleCounter scratch;
  for (int i = 0; i < m; ++i) {
    b[i] = 1;
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t col = static_cast<std::size_t>(i) * d + k;
      a[i][col] = 1;
      c[col] = evaluate(inst.buyers[i], bundles[k], scratch);
      for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(m) + j][col] = bundles[k].quantities[j];
    }
  }
  for (int j = 0; j < n; ++j) b[static_cast<std::size_t>(m) + j] = inst.supply[j];
  return Simplex(std::move(a), std::move(b), std::move(c)).solve();
}

bool equilibrium_exists_bruteforce(const MarketInstance& inst) {
  return configuration_lp_value(inst) == brute_force_welfare(inst).value;
}

}  // namespace walrus
