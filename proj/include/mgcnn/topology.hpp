#pragma once

#include "mgcnn/common.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mgcnn {

/// A directed edge (from, to) between node indices.
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Travel direction of a directed edge along the corridor axis. Node order in
/// the topology defines the axis: increasing index is `Forward` (eastbound).
enum class Direction { Forward, Reverse };

/// Static node/edge structure of a corridor. Every physical link appears as a
/// pair of directed edges with a shared positive length.
class CorridorTopology {
 public:
  CorridorTopology() = default;

  /// Builds and validates a topology from explicit directed edges.
  CorridorTopology(std::vector<std::string> node_ids, std::vector<Edge> edges,
                   std::map<Edge, double> link_length_miles);

  /// Convenience: a chain n0 - n1 - ... with the given link lengths.
  static CorridorTopology chain(std::vector<std::string> node_ids,
                                std::span<const double> lengths_miles);

  int node_count() const { return static_cast<int>(node_ids_.size()); }
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double link_length(Edge e) const;
  bool has_edge(Edge e) const { return lengths_.contains(e); }
  Direction direction(Edge e) const {
    return e.to > e.from ? Direction::Forward : Direction::Reverse;
  }
  int index_of(const std::string& id) const;

  /// Serializes to the line-oriented topology text format.
  std::string to_text() const;

 private:
  void validate() const;

  std::vector<std::string> node_ids_;
  std::vector<Edge> edges_;
  std::map<Edge, double> lengths_;
};

/// Parses the topology text format:
///   nodes: <id> <id> ...
///   link <id_i> <id_j> <miles>
/// Lines starting with '#' and blank lines are ignored.
CorridorTopology parse_topology(std::string_view text);
CorridorTopology load_topology(const std::filesystem::path& path);

/// Travel time in seconds for a link, with speed floored at `speed_floor_mph`.
double edge_weight(double length_miles, double speed_mph, double speed_floor_mph = 1.0);

/// Per-minute weighted adjacency plus node features.
struct GraphSnapshot {
  long timestep = 0;
  Matrix weights;        // n x n travel times in seconds, zero where no edge
  Matrix node_features;  // n x F
};

GraphSnapshot build_snapshot(const CorridorTopology& topology, long timestep,
                             const std::map<Edge, double>& speeds_mph, Matrix features,
                             double speed_floor_mph = 1.0);

/// A lookback stack of consecutive snapshots and the target at t + horizon.
/// Snapshots are a view into storage owned by the dataset.
struct MultiGraphWindow {
  std::span<const GraphSnapshot> snapshots;
  Matrix target;  // n x kMovements
  int horizon = 0;
  int lookback = 0;

  long last_minute() const { return snapshots.back().timestep; }
  long target_minute() const { return last_minute() + horizon; }
};

/// Slides a stride-1 window over the snapshot stream. `targets[t]` is the
/// n x kMovements target at stream position t. Emits T - M - N + 1 windows.
std::vector<MultiGraphWindow> stack_window(std::span<const GraphSnapshot> snapshots, int lookback,
                                           int horizon, std::span<const Matrix> targets,
                                           Warnings* warnings = nullptr);

}  // namespace mgcnn
