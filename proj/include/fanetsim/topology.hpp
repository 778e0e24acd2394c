#ifndef FANETSIM_TOPOLOGY_HPP_
#define FANETSIM_TOPOLOGY_HPP_

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fanetsim/mobility.hpp"

namespace fanetsim {

double distance(const Vec2& a, const Vec2& b);

// Frozen view of the contact graph at one instant: positions, pairwise
// distances and the neighbor sets induced by the communication range
// (inclusive at d == range). Immutable after construction.
struct ContactGraph {
  double timestamp = 0.0;
  double range = 0.0;
  std::vector<int> ids;         // ascending node ids
  std::vector<Vec2> positions;  // parallel to ids
  std::vector<double> dist;     // n*n row-major, by index
  std::vector<std::vector<int>> adj;  // sorted neighbor ids, by index

  int size() const { return static_cast<int>(ids.size()); }
  int index_of(int id) const;  // -1 if absent
  double pair_distance(int id_a, int id_b) const;
  const std::vector<int>& neighbors_of(int id) const;
  bool linked(int id_a, int id_b) const;
};

std::vector<int> neighbors(std::span<const Trajectory> nodes, int node_id,
                           double t, double range);

ContactGraph snapshot(std::span<const Trajectory> nodes, double t,
                      double range);

// (timestamp, i, j, d_ij) rows for every in-range pair, i < j.
void dump_adjacency(std::ostream& out, const ContactGraph& graph);

// Edge cost callback: (id_i, id_j, d_ij) -> non-negative cost.
using EdgeCostFn = std::function<double(int, int, double)>;

struct OraclePath {
  std::vector<int> nodes;  // src..dst inclusive
  double cost = 0.0;
};

// Globally minimal-cost path on the snapshot (Dijkstra), ties broken toward
// the smallest node-id sequence. Returns nullopt when dst is unreachable.
std::optional<OraclePath> oracle_min_cost_path(const ContactGraph& graph,
                                               int src, int dst,
                                               const EdgeCostFn& cost_fn);

}  // namespace fanetsim

#endif  // FANETSIM_TOPOLOGY_HPP_
