#pragma once

// Independent brute-force oracles. None of these call into the solver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// --- tiny integer programs -------------------------------------------------

struct TinyRow {
  std::vector<int> coef;
  int sense;  // -1: <=, 0: =, 1: >=
  int rhs;
};

struct TinyMip {
  std::vector<int> lower, upper;
  std::vector<int> cost;
  bool maximize = false;
  std::vector<TinyRow> rows;
};

inline TinyMip random_tiny_mip(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  TinyMip m;
  const int n = uni(1, 6);
  const int rows = uni(0, 8);
  for (int j = 0; j < n; ++j) {
    const int lo = uni(0, 3) == 0 ? -uni(1, 2) : 0;
    m.lower.push_back(lo);
    m.upper.push_back(uni(std::max(lo, 0), 5));
    m.cost.push_back(uni(-10, 10));
  }
  m.maximize = uni(0, 1) == 1;
  for (int i = 0; i < rows; ++i) {
    TinyRow r;
    int at_mid = 0;
    for (int j = 0; j < n; ++j) {
      r.coef.push_back(uni(-5, 5));
      at_mid += r.coef.back() * (m.lower[j] + m.upper[j]) / 2;
    }
    r.sense = uni(-1, 1);
    if (r.sense == 0 && uni(0, 2) != 0) r.sense = -1;  // equalities are rarer
    r.rhs = at_mid + uni(-6, 6);
    m.rows.push_back(std::move(r));
  }
  return m;
}

// Best objective over all integer points, or nullopt if none is feasible.
inline std::optional<long> enumerate(const TinyMip& m) {
  const std::size_t n = m.cost.size();
  std::vector<int> x(m.lower);
  std::optional<long> best;
  while (true) {
    bool feasible = true;
    for (const auto& r : m.rows) {
      long lhs = 0;
      for (std::size_t j = 0; j < n; ++j) lhs += static_cast<long>(r.coef[j]) * x[j];
      if ((r.sense < 0 && lhs > r.rhs) || (r.sense > 0 && lhs < r.rhs) ||
          (r.sense == 0 && lhs != r.rhs)) {
        feasible = false;
        break;
      }
    }
    if (feasible) {
      long obj = 0;
      for (std::size_t j = 0; j < n; ++j) obj += static_cast<long>(m.cost[j]) * x[j];
      if (!best || (m.maximize ? obj > *best : obj < *best)) best = obj;
    }
    std::size_t j = 0;
    while (j < n && x[j] == m.upper[j]) {
      x[j] = m.lower[j];
      ++j;
    }
    if (j == n) break;
    ++x[j];
  }
  return best;
}

// --- traveling salesman ----------------------------------------------------

// Shortest closed tour starting and ending at city 0, over all permutations.
inline long tsp_brute_force(const std::vector<std::vector<long>>& dist) {
  std::vector<int> perm(dist.size() - 1);
  std::iota(perm.begin(), perm.end(), 1);
  long best = std::numeric_limits<long>::max();
  do {
    long len = dist[0][perm.front()] + dist[perm.back()][0];
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) len += dist[perm[k]][perm[k + 1]];
    best = std::min(best, len);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// --- min-cost flow (successive shortest paths, Bellman-Ford) ---------------

class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(nodes) {}

  void add_arc(int from, int to, long cap, long cost) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap, cost});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, 0, -cost});
  }

  // Sends `need` units from s to t; returns cost or nullopt if impossible.
  std::optional<long> run(int s, int t, long need) {
    long total = 0;
    const int n = static_cast<int>(adj_.size());
    while (need > 0) {
      std::vector<long> dist(n, std::numeric_limits<long>::max());
      std::vector<int> via(n, -1);
      dist[s] = 0;
      for (int iter = 0; iter < n; ++iter) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == std::numeric_limits<long>::max()) continue;
          for (int a : adj_[u]) {
            const Arc& arc = arcs_[a];
            if (arc.cap > 0 && dist[u] + arc.cost < dist[arc.to]) {
              dist[arc.to] = dist[u] + arc.cost;
              via[arc.to] = a;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (via[t] < 0) return std::nullopt;
      long push = need;
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) push = std::min(push, arcs_[via[v]].cap);
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
      need -= push;
      total += push * dist[t];
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    long cap;
    long cost;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

// --- capacitated facility location ----------------------------------------

struct FacilityInstance {
  std::vector<long> fixed, capacity, demand;
  std::vector<std::vector<long>> cost;  // [facility][customer]
};

// Enumerates every open/closed subset; each subset's transport cost comes
// from an exact min-cost flow.
inline std::optional<long> facility_brute_force(const FacilityInstance& in) {
  const int nf = static_cast<int>(in.fixed.size());
  const int nc = static_cast<int>(in.demand.size());
  const long total_demand = std::accumulate(in.demand.begin(), in.demand.end(), 0L);
  std::optional<long> best;
  for (int mask = 0; mask < (1 << nf); ++mask) {
    long fixed = 0;
    MinCostFlow g(nf + nc + 2);
    const int s = nf + nc;
    const int t = s + 1;
    for (int f = 0; f < nf; ++f) {
      if (!(mask >> f & 1)) continue;
      fixed += in.fixed[f];
      g.add_arc(s, f, in.capacity[f], 0);
      for (int c = 0; c < nc; ++c) g.add_arc(f, nf + c, in.capacity[f], in.cost[f][c]);
    }
    for (int c = 0; c < nc; ++c) g.add_arc(nf + c, t, in.demand[c], 0);
    const auto flow = g.run(s, t, total_demand);
    if (!flow) continue;
    const long value = fixed + *flow;
    if (!best || value < *best) best = value;
  }
  return best;
}

// --- workforce ----------------------------------------------------------------

struct WorkforceInstance {
  std::vector<std::vector<long>> cost;       // [worker][task]
  std::vector<std::vector<int>> qualified;   // [worker][task]
  std::vector<int> max_tasks;                // [worker]
};

// One worker per task; enumerates every task -> worker map.
inline std::optional<long> workforce_brute_force(const WorkforceInstance& in) {
  const int nw = static_cast<int>(in.max_tasks.size());
  const int nt = static_cast<int>(in.cost.front().size());
  std::vector<int> pick(nt, 0);
  std::optional<long> best;
  while (true) {
    std::vector<int> load(nw, 0);
    long total = 0;
    bool ok = true;
    for (int t = 0; t < nt && ok; ++t) {
      const int w = pick[t];
      ok = in.qualified[w][t] == 1 && ++load[w] <= in.max_tasks[w];
      total += in.cost[w][t];
    }
    if (ok && (!best || total < *best)) best = total;
    int t = 0;
    while (t < nt && pick[t] == nw - 1) pick[t++] = 0;
    if (t == nt) break;
    ++pick[t];
  }
  return best;
}

// --- multi-commodity flow by path splitting -------------------------------

struct Commodity {
  int source;
  int sink;
  long amount;
};

struct FlowNetwork {
  int nodes = 0;
  std::vector<std::vector<long>> capacity;  // [i][j], 0 = no arc
  std::vector<std::vector<long>> cost;
};

inline std::vector<std::vector<int>> simple_paths(const FlowNetwork& net, int s, int t) {
  std::vector<std::vector<int>> paths;
  std::vector<int> path{s};
  std::vector<bool> on(net.nodes, false);
  on[s] = true;
  std::function<void(int)> dfs = [&](int u) {
    if (u == t) {
      paths.push_back(path);
      return;
    }
    for (int v = 0; v < net.nodes; ++v) {
      if (net.capacity[u][v] <= 0 || on[v]) continue;
      on[v] = true;
      path.push_back(v);
      dfs(v);
      path.pop_back();
      on[v] = false;
    }
  };
  dfs(s);
  return paths;
}

// Every integer split of each commodity's amount across its simple paths.
// With positive arc costs an optimal arc flow has no cycles, so this covers
// the optimum.
inline std::optional<long> mcnf_brute_force(const FlowNetwork& net,
                                            const std::vector<Commodity>& goods) {
  std::vector<std::vector<std::vector<int>>> paths;
  for (const auto& g : goods) paths.push_back(simple_paths(net, g.source, g.sink));
  std::vector<std::vector<long>> load(net.nodes, std::vector<long>(net.nodes, 0));
  std::optional<long> best;

  std::function<void(std::size_t, std::size_t, long, long)> rec =
      [&](std::size_t k, std::size_t p, long left, long cost) {
        if (k == goods.size()) {
          if (!best || cost < *best) best = cost;
          return;
        }
        const auto& ps = paths[k];
        if (p + 1 == ps.size() || left == 0) {
          // Remaining amount goes on path p (or nothing is left).
          const auto& path = ps.empty() ? std::vector<int>{} : ps[p];
          if (left > 0 && ps.empty()) return;
          bool ok = true;
          long c = 0;
          for (std::size_t i = 0; left > 0 && i + 1 < path.size(); ++i) {
            load[path[i]][path[i + 1]] += left;
            ok = ok && load[path[i]][path[i + 1]] <= net.capacity[path[i]][path[i + 1]];
            c += left * net.cost[path[i]][path[i + 1]];
          }
          if (ok) rec(k + 1, 0, k + 1 < goods.size() ? goods[k + 1].amount : 0, cost + c);
          for (std::size_t i = 0; left > 0 && i + 1 < path.size(); ++i) {
            load[path[i]][path[i + 1]] -= left;
          }
          return;
        }
        const auto& path = ps[p];
        for (long amt = 0; amt <= left; ++amt) {
          bool ok = true;
          long c = 0;
          for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            load[path[i]][path[i + 1]] += amt;
            ok = ok && load[path[i]][path[i + 1]] <= net.capacity[path[i]][path[i + 1]];
            c += amt * net.cost[path[i]][path[i + 1]];
          }
          if (ok) rec(k, p + 1, left - amt, cost + c);
          for (std::size_t i = 0; i + 1 < path.size(); ++i) load[path[i]][path[i + 1]] -= amt;
          if (!ok) break;  // larger amounts only add load
        }
      };
  if (!goods.empty()) rec(0, 0, goods[0].amount, 0);
  return best;
}

}  // namespace oracle
