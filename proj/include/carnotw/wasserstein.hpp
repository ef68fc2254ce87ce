#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnotw/measure.hpp"
#include "carnotw/norms.hpp"
#include "carnotw/vec.hpp"

namespace carnotw {

struct TransportSolution {
  double value = 0.0;
  std::vector<double> flow;  // m*n, row-major; supported on a spanning forest
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  int pivots = 0;
};

/// Exact solver for the dense transportation problem
///     min sum_ij c_ij x_ij,  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0
/// by primal network simplex on the complete bipartite graph.
///
/// The basis is a spanning tree; the entering arc is the one of most negative
/// reduced cost with lexicographic (row, col) tie-breaking, and the leaving
/// arc is the lexicographically least among those attaining the minimum cycle
/// flow. A long streak of degenerate pivots switches entering selection to
/// Bland's rule (first improving arc in (row, col) order), which cannot cycle.
/// Identical inputs therefore always produce the identical basic optimum.
inline TransportSolution solve_transportation(const std::vector<double>& cost,
                                              const std::vector<double>& a,
                                              const std::vector<double>& b) {
  const std::size_t m = a.size(), n = b.size();
  if (m == 0 || n == 0) throw std::invalid_argument("transportation needs nonempty marginals");
  if (cost.size() != m * n) throw std::invalid_argument("cost matrix shape mismatch");
  double ta = 0.0, tb = 0.0;
  for (double w : a) {
    if (!(w > 0.0)) throw std::invalid_argument("row weights must be strictly positive");
    ta += w;
  }
  for (double w : b) {
    if (!(w > 0.0)) throw std::invalid_argument("column weights must be strictly positive");
    tb += w;
  }
  if (std::abs(ta - tb) > kMassTol)
    throw std::invalid_argument("transportation marginals differ in total mass by " +
                                fmt_g(std::abs(ta - tb)));

  const std::size_t nodes = m + n;
  const std::size_t nb = nodes - 1;  // basis size
  std::vector<std::size_t> arc_row(nb), arc_col(nb);
  std::vector<double> arc_flow(nb);
  std::vector<std::vector<int>> adj(nodes);

  // Northwest-corner start: advances one marginal per step, so it places
  // exactly m + n - 1 arcs forming a spanning tree.
  {
    std::size_t i = 0, j = 0, slot = 0;
    double ra = a[0], rb = b[0];
    for (;;) {
      const double f = std::min(ra, rb);
      arc_row[slot] = i;
      arc_col[slot] = j;
      arc_flow[slot] = f;
      adj[i].push_back(static_cast<int>(slot));
      adj[m + j].push_back(static_cast<int>(slot));
      ++slot;
      ra -= f;
      rb -= f;
      const bool can_i = i + 1 < m, can_j = j + 1 < n;
      if (!can_i && !can_j) break;
      // The exhausted side advances; ties advance the row, leaving a
      // degenerate zero arc on the next step.
      if (can_i && (ra <= 0.0 || !can_j)) {
        ++i;
        ra = a[i];
      } else {
        ++j;
        rb = b[j];
      }
    }
  }

  double max_cost = 0.0;
  for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
  const double eps_opt = 1e-11 * (1.0 + max_cost);

  std::vector<double> u(m), v(n);
  std::vector<int> parent_node(nodes), parent_arc(nodes), depth(nodes), stack;
  stack.reserve(nodes);

  const auto refresh_tree = [&] {
    // One DFS from node 0 sets potentials (u_i + v_j = c_ij on basic arcs)
    // and the rooted-tree arrays used for cycle extraction.
    std::fill(parent_node.begin(), parent_node.end(), -1);
    parent_node[0] = 0;
    parent_arc[0] = -1;
    depth[0] = 0;
    u[0] = 0.0;
    stack.clear();
    stack.push_back(0);
    std::size_t visited = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int s : adj[static_cast<std::size_t>(x)]) {
        const int r = static_cast<int>(arc_row[static_cast<std::size_t>(s)]);
        const int c = static_cast<int>(m + arc_col[static_cast<std::size_t>(s)]);
        const int y = (x == r) ? c : r;
        if (parent_node[static_cast<std::size_t>(y)] != -1) continue;
        parent_node[static_cast<std::size_t>(y)] = x;
        parent_arc[static_cast<std::size_t>(y)] = s;
        depth[static_cast<std::size_t>(y)] = depth[static_cast<std::size_t>(x)] + 1;
        const std::size_t ci = arc_row[static_cast<std::size_t>(s)] * n +
                               arc_col[static_cast<std::size_t>(s)];
        if (y == c)
          v[arc_col[static_cast<std::size_t>(s)]] = cost[ci] - u[arc_row[static_cast<std::size_t>(s)]];
        else
          u[arc_row[static_cast<std::size_t>(s)]] = cost[ci] - v[arc_col[static_cast<std::size_t>(s)]];
        stack.push_back(y);
        ++visited;
      }
    }
    if (visited != nodes) throw std::runtime_error("internal: transport basis is not spanning");
  };

  const std::size_t pivot_cap = 10000 + 200 * nodes;
  int pivots = 0;
  std::size_t degenerate_streak = 0;
  bool bland = false;

  for (;;) {
    refresh_tree();

    // Entering arc.
    std::size_t ei = m, ej = n;
    double best = -eps_opt;
    bool found = false;
    for (std::size_t i = 0; i < m && !(bland && found); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double rc = cost[i * n + j] - u[i] - v[j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          found = true;
          if (bland) break;
        }
      }
    }
    if (!found) break;

    // Cycle: tree path from the entering column up to the entering row.
    std::vector<int> up_j, up_i;
    {
      int x = static_cast<int>(m + ej), y = static_cast<int>(ei);
      while (depth[static_cast<std::size_t>(x)] > depth[static_cast<std::size_t>(y)]) {
        up_j.push_back(parent_arc[static_cast<std::size_t>(x)]);
        x = parent_node[static_cast<std::size_t>(x)];
      }
      while (depth[static_cast<std::size_t>(y)] > depth[static_cast<std::size_t>(x)]) {
        up_i.push_back(parent_arc[static_cast<std::size_t>(y)]);
        y = parent_node[static_cast<std::size_t>(y)];
      }
      while (x != y) {
        up_j.push_back(parent_arc[static_cast<std::size_t>(x)]);
        x = parent_node[static_cast<std::size_t>(x)];
        up_i.push_back(parent_arc[static_cast<std::size_t>(y)]);
        y = parent_node[static_cast<std::size_t>(y)];
      }
    }
    std::vector<int> walk = up_j;
    walk.insert(walk.end(), up_i.rbegin(), up_i.rend());

    // Walking from the entering column, even positions lose flow.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t k = 0; k < walk.size(); k += 2) {
      const int s = walk[k];
      const double f = arc_flow[static_cast<std::size_t>(s)];
      const std::size_t sr = arc_row[static_cast<std::size_t>(s)],
                        sc = arc_col[static_cast<std::size_t>(s)];
      if (f < theta ||
          (f == theta && leave >= 0 &&
           std::make_pair(sr, sc) < std::make_pair(arc_row[static_cast<std::size_t>(leave)],
                                                   arc_col[static_cast<std::size_t>(leave)]))) {
        theta = f;
        leave = s;
      }
    }
    if (leave < 0) throw std::runtime_error("internal: transport pivot found no leaving arc");

    for (std::size_t k = 0; k < walk.size(); ++k) {
      const auto s = static_cast<std::size_t>(walk[k]);
      arc_flow[s] = std::max(0.0, (k % 2 == 0) ? arc_flow[s] - theta : arc_flow[s] + theta);
    }

    // Reuse the leaving slot for the entering arc.
    {
      const auto s = static_cast<std::size_t>(leave);
      const auto drop = [&](std::size_t node) {
        auto& l = adj[node];
        l.erase(std::find(l.begin(), l.end(), leave));
      };
      drop(arc_row[s]);
      drop(m + arc_col[s]);
      arc_row[s] = ei;
      arc_col[s] = ej;
      arc_flow[s] = theta;
      adj[ei].push_back(leave);
      adj[m + ej].push_back(leave);
    }

    ++pivots;
    degenerate_streak = (theta == 0.0) ? degenerate_streak + 1 : 0;
    if (degenerate_streak > 2 * nodes + 50) bland = true;
    if (static_cast<std::size_t>(pivots) > pivot_cap)
      throw std::runtime_error("internal: transport simplex exceeded its pivot budget");
  }

  TransportSolution sol;
  sol.flow.assign(m * n, 0.0);
  sol.value = 0.0;
  for (std::size_t s = 0; s < nb; ++s) {
    sol.flow[arc_row[s] * n + arc_col[s]] = arc_flow[s];
    sol.value += arc_flow[s] * cost[arc_row[s] * n + arc_col[s]];
  }
  sol.row_potential = u;
  sol.col_potential = v;
  sol.pivots = pivots;

  // Marginal consistency, part of the contract of the returned plan.
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += sol.flow[i * n + j];
    if (std::abs(s - a[i]) > kMassTol)
      throw std::runtime_error("internal: transport row marginal drifted by " +
                               fmt_g(std::abs(s - a[i])));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += sol.flow[i * n + j];
    if (std::abs(s - b[j]) > kMassTol)
      throw std::runtime_error("internal: transport column marginal drifted by " +
                               fmt_g(std::abs(s - b[j])));
  }
  return sol;
}

/// Transportation plan between the supports of two measures.
struct Coupling {
  std::vector<Vec> row_points;
  std::vector<Vec> col_points;
  std::vector<double> flow;  // rows() * cols(), row-major

  std::size_t rows() const { return row_points.size(); }
  std::size_t cols() const { return col_points.size(); }
  double at(std::size_t i, std::size_t j) const { return flow[i * cols() + j]; }
};

struct W1Result {
  double distance = 0.0;
  Coupling plan;
};

/// Exact 1-Wasserstein distance between equal-mass measures with ground cost
/// d_N, together with an optimal basic plan.
inline W1Result w1_distance(const NormSpec& norm, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu) {
  if (mu.empty() || nu.empty())
    throw std::invalid_argument("w1_distance requires nonempty measures");
  require_equal_totals(mu, nu, "w1_distance");
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> cost(m * n), a(m), b(n);
  for (std::size_t i = 0; i < m; ++i) a[i] = mu.weight(i);
  for (std::size_t j = 0; j < n; ++j) b[j] = nu.weight(j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = norm.distance(mu.point(i), nu.point(j));
  TransportSolution sol = solve_transportation(cost, a, b);
  W1Result res;
  res.distance = sol.value;
  res.plan.flow = std::move(sol.flow);
  res.plan.row_points.reserve(m);
  res.plan.col_points.reserve(n);
  for (std::size_t i = 0; i < m; ++i) res.plan.row_points.push_back(mu.point(i));
  for (std::size_t j = 0; j < n; ++j) res.plan.col_points.push_back(nu.point(j));
  return res;
}

inline double w1(const NormSpec& norm, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return w1_distance(norm, mu, nu).distance;
}

inline void write_plan_csv(std::ostream& os, const Coupling& plan, const NormSpec& norm) {
  os << "i,j,flow,cost\n";
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      const double f = plan.at(i, j);
      if (f <= 0.0) continue;
      os << i << "," << j << "," << fmt_g(f) << ","
         << fmt_g(norm.distance(plan.row_points[i], plan.col_points[j])) << "\n";
    }
}

/// Independent oracle for small instances: every vertex of the transportation
/// polytope is the flow of a spanning forest, and every forest extends to a
/// spanning tree of the complete bipartite graph, so minimising the unique
/// tree-induced flow cost over all spanning trees (discarding infeasible,
/// negative-flow trees) recovers the optimum. Limited to m + n <= 8.
inline double w1_bruteforce(const std::vector<std::vector<double>>& cost,
                            const std::vector<double>& mu_weights,
                            const std::vector<double>& nu_weights) {
  const std::size_t m = mu_weights.size(), n = nu_weights.size();
  if (m == 0 || n == 0) throw std::invalid_argument("oracle requires nonempty marginals");
  if (m + n > 8) throw std::invalid_argument("brute-force oracle is limited to m + n <= 8");
  if (cost.size() != m) throw std::invalid_argument("cost matrix shape mismatch");
  for (const auto& row : cost)
    if (row.size() != n) throw std::invalid_argument("cost matrix shape mismatch");
  double ta = std::accumulate(mu_weights.begin(), mu_weights.end(), 0.0);
  double tb = std::accumulate(nu_weights.begin(), nu_weights.end(), 0.0);
  if (std::abs(ta - tb) > kMassTol)
    throw std::invalid_argument("oracle marginals differ in total mass");

  const std::size_t arcs = m * n, nodes = m + n, pick = nodes - 1;
  std::vector<std::size_t> comb(pick);
  std::iota(comb.begin(), comb.end(), 0);
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> parent(nodes), deg(nodes);
  std::vector<double> balance(nodes);
  std::vector<std::array<int, 2>> ends(pick);

  const auto evaluate = [&] {
    // Spanning-tree test by union-find.
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x)
        x = parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      return x;
    };
    for (std::size_t k = 0; k < pick; ++k) {
      const int r = static_cast<int>(comb[k] / n);
      const int c = static_cast<int>(m + comb[k] % n);
      ends[k] = {r, c};
      const int fr = find(r), fc = find(c);
      if (fr == fc) return;  // cycle
      parent[static_cast<std::size_t>(fr)] = fc;
    }
    // Unique tree flow by leaf elimination.
    std::fill(deg.begin(), deg.end(), 0);
    for (const auto& e : ends) {
      ++deg[static_cast<std::size_t>(e[0])];
      ++deg[static_cast<std::size_t>(e[1])];
    }
    for (std::size_t i = 0; i < m; ++i) balance[i] = mu_weights[i];
    for (std::size_t j = 0; j < n; ++j) balance[m + j] = -nu_weights[j];
    std::vector<bool> used(pick, false);
    double total = 0.0;
    for (std::size_t round = 0; round < pick; ++round) {
      // Find a leaf with an unused arc.
      int leaf = -1, arc = -1;
      for (std::size_t x = 0; x < nodes && leaf < 0; ++x) {
        if (deg[x] != 1) continue;
        for (std::size_t k = 0; k < pick; ++k)
          if (!used[k] && (ends[k][0] == static_cast<int>(x) || ends[k][1] == static_cast<int>(x))) {
            leaf = static_cast<int>(x);
            arc = static_cast<int>(k);
            break;
          }
      }
      const auto ak = static_cast<std::size_t>(arc);
      const int other = (ends[ak][0] == leaf) ? ends[ak][1] : ends[ak][0];
      // Flow is shipped row -> column; a leaf fixes its arc's flow.
      const bool leaf_is_row = leaf < static_cast<int>(m);
      const double f = leaf_is_row ? balance[static_cast<std::size_t>(leaf)]
                                   : -balance[static_cast<std::size_t>(leaf)];
      if (f < -1e-12) return;  // infeasible tree
      balance[static_cast<std::size_t>(leaf)] = 0.0;
      balance[static_cast<std::size_t>(other)] += leaf_is_row ? f : -f;
      const std::size_t r = static_cast<std::size_t>(std::min(ends[ak][0], ends[ak][1]));
      const std::size_t c = static_cast<std::size_t>(std::max(ends[ak][0], ends[ak][1])) - m;
      total += std::max(0.0, f) * cost[r][c];
      used[ak] = true;
      --deg[static_cast<std::size_t>(leaf)];
      --deg[static_cast<std::size_t>(other)];
    }
    best = std::min(best, total);
  };

  for (;;) {
    evaluate();
    // Next combination of `pick` arcs out of `arcs`.
    std::size_t k = pick;
    while (k > 0 && comb[k - 1] == arcs - pick + (k - 1)) --k;
    if (k == 0) break;
    ++comb[k - 1];
    for (std::size_t l = k; l < pick; ++l) comb[l] = comb[l - 1] + 1;
  }
  if (!std::isfinite(best)) throw std::runtime_error("internal: oracle found no feasible tree");
  return best;
}

/// Kantorovich potential certified by a plan: 1-Lipschitz on the combined
/// support and attaining the primal value in the dual objective.
struct DualPotential {
  std::vector<Vec> points;     // canonical (lexicographic) order
  std::vector<double> values;  // f at the matching point
  double lipschitz_bound = 0.0;

  double value_at(const Vec& p) const {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (euclid_dist(points[i], p) <= kPointMergeTol) return values[i];
    throw std::invalid_argument("potential is not defined at " + format_point(p));
  }
};

struct KrResult {
  DualPotential potential;
  double gap = 0.0;  // primal value minus the dual objective of the potential
};

/// Recovers a dual certificate from an optimal plan. Along every positive
/// flow arc the potential rises by exactly the arc cost; this propagates f on
/// each connected flow component, and components are then shifted so the
/// function stays 1-Lipschitz across the whole support (a feasible shift
/// interval exists by the triangle inequality). A Lipschitz violation or a
/// duality gap beyond 1e-9 means the supplied plan was not optimal and is
/// reported as an error.
inline KrResult kr_dual(const NormSpec& norm, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu, const Coupling& plan) {
  const std::size_t m = mu.size(), n = nu.size();
  if (plan.rows() != m || plan.cols() != n)
    throw std::invalid_argument("coupling shape does not match the measures");
  for (std::size_t i = 0; i < m; ++i)
    if (euclid_dist(plan.row_points[i], mu.point(i)) > kPointMergeTol)
      throw std::invalid_argument("coupling row support does not match mu");
  for (std::size_t j = 0; j < n; ++j)
    if (euclid_dist(plan.col_points[j], nu.point(j)) > kPointMergeTol)
      throw std::invalid_argument("coupling column support does not match nu");
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += plan.at(i, j);
    if (std::abs(s - mu.weight(i)) > kMassTol)
      throw std::invalid_argument("coupling row marginal differs from mu by " +
                                  fmt_g(std::abs(s - mu.weight(i))));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += plan.at(i, j);
    if (std::abs(s - nu.weight(j)) > kMassTol)
      throw std::invalid_argument("coupling column marginal differs from nu by " +
                                  fmt_g(std::abs(s - nu.weight(j))));
  }

  const std::size_t nodes = m + n;
  const auto node_point = [&](std::size_t x) -> const Vec& {
    return x < m ? mu.point(x) : nu.point(x - m);
  };
  const double flow_floor = 1e-11 * std::max(1.0, mu.total());

  // Pairwise ground distances (the cost matrix plus same-side distances).
  std::vector<double> dist(nodes * nodes, 0.0);
  for (std::size_t x = 0; x < nodes; ++x)
    for (std::size_t y = x + 1; y < nodes; ++y)
      dist[x * nodes + y] = dist[y * nodes + x] = norm.distance(node_point(x), node_point(y));

  // Propagate f along positive-flow arcs, component by component.
  std::vector<double> f(nodes, 0.0);
  std::vector<int> comp(nodes, -1);
  double primal = 0.0;
  int comp_count = 0;
  for (std::size_t root = 0; root < nodes; ++root) {
    if (comp[root] != -1) continue;
    const int id = comp_count++;
    comp[root] = id;
    f[root] = 0.0;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x < m) {
        for (std::size_t j = 0; j < n; ++j) {
          if (plan.at(x, j) <= flow_floor || comp[m + j] != -1) continue;
          comp[m + j] = id;
          f[m + j] = f[x] + dist[x * nodes + (m + j)];
          stack.push_back(m + j);
        }
      } else {
        const std::size_t j = x - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (plan.at(i, j) <= flow_floor || comp[i] != -1) continue;
          comp[i] = id;
          f[i] = f[x] - dist[i * nodes + x];
          stack.push_back(i);
        }
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) primal += plan.at(i, j) * dist[i * nodes + (m + j)];

  // Per-component shifts k_c making f globally 1-Lipschitz solve the
  // difference constraints k_c' - k_c <= W(c,c') with
  //   W(c,c') = min over x in c, y in c' of d(x,y) - (f(y) - f(x)).
  // An optimal plan always admits a solution (the offsets of any optimal
  // Lipschitz potential work), obtained here as shortest paths from the
  // first component; a negative cycle certifies a suboptimal plan. Shifts
  // do not move the dual objective because every flow component carries
  // equal row and column mass.
  if (comp_count > 1) {
    const auto cc = static_cast<std::size_t>(comp_count);
    std::vector<double> W(cc * cc, std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < nodes; ++x)
      for (std::size_t y = 0; y < nodes; ++y) {
        if (comp[x] == comp[y]) continue;
        const auto cx = static_cast<std::size_t>(comp[x]);
        const auto cy = static_cast<std::size_t>(comp[y]);
        W[cx * cc + cy] = std::min(W[cx * cc + cy], dist[x * nodes + y] - f[y] + f[x]);
      }
    std::vector<double> k(cc, std::numeric_limits<double>::infinity());
    k[0] = 0.0;
    for (std::size_t round = 0; round + 1 < cc; ++round)
      for (std::size_t a = 0; a < cc; ++a)
        for (std::size_t b = 0; b < cc; ++b)
          if (k[a] + W[a * cc + b] < k[b]) k[b] = k[a] + W[a * cc + b];
    for (std::size_t a = 0; a < cc; ++a)
      for (std::size_t b = 0; b < cc; ++b)
        if (k[a] + W[a * cc + b] < k[b] - 1e-9)
          throw std::invalid_argument(
              "coupling is not optimal: no Lipschitz-compatible component shifts");
    for (std::size_t x = 0; x < nodes; ++x) f[x] += k[static_cast<std::size_t>(comp[x])];
  }

  // Certify the potential.
  double worst_lip = 0.0, lip_ratio = 0.0;
  for (std::size_t x = 0; x < nodes; ++x)
    for (std::size_t y = x + 1; y < nodes; ++y) {
      const double d = dist[x * nodes + y];
      const double df = std::abs(f[x] - f[y]);
      worst_lip = std::max(worst_lip, df - d);
      if (d > kPointMergeTol) lip_ratio = std::max(lip_ratio, df / d);
    }
  if (worst_lip > 1e-9)
    throw std::invalid_argument("coupling is not optimal: potential exceeds Lipschitz bound by " +
                                fmt_g(worst_lip));

  double dual = 0.0;
  for (std::size_t j = 0; j < n; ++j) dual += nu.weight(j) * f[m + j];
  for (std::size_t i = 0; i < m; ++i) dual -= mu.weight(i) * f[i];
  const double gap = primal - dual;
  if (std::abs(gap) > 1e-9)
    throw std::invalid_argument("coupling is not optimal: duality gap " + fmt_g(gap));

  // Collapse to one value per distinct support point.
  std::vector<Atom> vals;
  vals.reserve(nodes);
  for (std::size_t x = 0; x < nodes; ++x) vals.push_back({node_point(x), f[x]});
  std::sort(vals.begin(), vals.end(),
            [](const Atom& p, const Atom& q) { return p.point < q.point; });
  KrResult out;
  out.gap = gap;
  out.potential.lipschitz_bound = lip_ratio;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (k > 0 && euclid_dist(vals[k].point, out.potential.points.back()) <= kPointMergeTol)
      continue;  // duplicate node (point in both supports); values agree within 1e-9
    out.potential.points.push_back(vals[k].point);
    out.potential.values.push_back(vals[k].weight);
  }
  return out;
}

}  // namespace carnotw
