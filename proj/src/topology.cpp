#include "fanetsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace fanetsim {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

int ContactGraph::index_of(int id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

double ContactGraph::pair_distance(int id_a, int id_b) const {
  const int a = index_of(id_a);
  const int b = index_of(id_b);
  if (a < 0 || b < 0) throw std::invalid_argument("unknown node id");
  return dist[static_cast<std::size_t>(a) * ids.size() +
              static_cast<std::size_t>(b)];
}

const std::vector<int>& ContactGraph::neighbors_of(int id) const {
  const int i = index_of(id);
  if (i < 0) throw std::invalid_argument("unknown node id");
  return adj[static_cast<std::size_t>(i)];
}

bool ContactGraph::linked(int id_a, int id_b) const {
  return id_a != id_b && pair_distance(id_a, id_b) <= range;
}

std::vector<int> neighbors(std::span<const Trajectory> nodes, int node_id,
                           double t, double range) {
  const Trajectory* self = nullptr;
  for (const Trajectory& traj : nodes)
    if (traj.node_id == node_id) self = &traj;
  if (self == nullptr) throw std::invalid_argument("unknown node id");
  const Vec2 p = self->position_at(t);
  std::vector<int> result;
  for (const Trajectory& traj : nodes) {
    if (traj.node_id == node_id) continue;
    if (distance(p, traj.position_at(t)) <= range)
      result.push_back(traj.node_id);
  }
  std::sort(result.begin(), result.end());
  return result;
}

ContactGraph snapshot(std::span<const Trajectory> nodes, double t,
                      double range) {
  ContactGraph g;
  g.timestamp = t;
  g.range = range;
  std::vector<std::pair<int, Vec2>> rows;
  rows.reserve(nodes.size());
  for (const Trajectory& traj : nodes)
    rows.emplace_back(traj.node_id, traj.position_at(t));
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t n = rows.size();
  g.ids.reserve(n);
  g.positions.reserve(n);
  for (const auto& [id, pos] : rows) {
    g.ids.push_back(id);
    g.positions.push_back(pos);
  }
  g.dist.assign(n * n, 0.0);
  g.adj.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(g.positions[i], g.positions[j]);
      g.dist[i * n + j] = d;
      g.dist[j * n + i] = d;
      if (d <= range) {
        g.adj[i].push_back(g.ids[j]);
        g.adj[j].push_back(g.ids[i]);
      }
    }
  }
  return g;
}

void dump_adjacency(std::ostream& out, const ContactGraph& graph) {
  const std::size_t n = graph.ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = graph.dist[i * n + j];
      if (d <= graph.range)
        out << graph.timestamp << ' ' << graph.ids[i] << ' ' << graph.ids[j]
            << ' ' << d << '\n';
    }
  }
}

std::optional<OraclePath> oracle_min_cost_path(const ContactGraph& graph,
                                               int src, int dst,
                                               const EdgeCostFn& cost_fn) {
  const int si = graph.index_of(src);
  const int di = graph.index_of(dst);
  if (si < 0 || di < 0) throw std::invalid_argument("unknown node id");
  if (src == dst) return OraclePath{{src}, 0.0};

  const std::size_t n = graph.ids.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Edge costs by index, forward direction u -> v.
  auto edge = [&](std::size_t u, std::size_t v) {
    const double c =
        cost_fn(graph.ids[u], graph.ids[v], graph.dist[u * n + v]);
    if (c < 0.0) throw std::invalid_argument("negative edge cost");
    return c;
  };

  // Dijkstra from dst over reversed edges gives the remaining cost to dst
  // from every node; the lexicographically smallest optimal path is then
  // reconstructed greedily along tight edges.
  std::vector<double> to_dst(n, kInf);
  to_dst[static_cast<std::size_t>(di)] = 0.0;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, static_cast<std::size_t>(di));
  std::vector<char> done(n, 0);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (int id_u : graph.adj[v]) {
      const std::size_t u = static_cast<std::size_t>(graph.index_of(id_u));
      const double cand = d + edge(u, v);
      if (cand < to_dst[u]) {
        to_dst[u] = cand;
        pq.emplace(cand, u);
      }
    }
  }

  if (!std::isfinite(to_dst[static_cast<std::size_t>(si)])) return std::nullopt;

  OraclePath result;
  result.cost = to_dst[static_cast<std::size_t>(si)];
  std::size_t cur = static_cast<std::size_t>(si);
  result.nodes.push_back(src);
  std::vector<char> visited(n, 0);
  visited[cur] = 1;
  while (static_cast<int>(cur) != di) {
    std::size_t next = n;
    for (int id_v : graph.adj[cur]) {  // adj is sorted: first tight edge wins
      const std::size_t v = static_cast<std::size_t>(graph.index_of(id_v));
      if (visited[v]) continue;
      const double via = edge(cur, v) + to_dst[v];
      const double tol = 1e-12 * std::max(1.0, std::abs(to_dst[cur]));
      if (std::abs(via - to_dst[cur]) <= tol) {
        next = v;
        break;
      }
    }
    if (next == n) return std::nullopt;  // numeric dead end; treat as no path
    visited[next] = 1;
    result.nodes.push_back(graph.ids[next]);
    cur = next;
  }
  return result;
}

}  // namespace fanetsim
