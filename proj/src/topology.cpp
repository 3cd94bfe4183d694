#include "mgcnn/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mgcnn {

namespace {

std::string edge_name(const std::vector<std::string>& ids, Edge e) {
  auto name = [&](int i) {
    return (i >= 0 && i < static_cast<int>(ids.size())) ? ids[i] : "#" + std::to_string(i);
  };
  return "(" + name(e.from) + ", " + name(e.to) + ")";
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

CorridorTopology::CorridorTopology(std::vector<std::string> node_ids, std::vector<Edge> edges,
                                   std::map<Edge, double> link_length_miles)
    : node_ids_(std::move(node_ids)), edges_(std::move(edges)), lengths_(std::move(link_length_miles)) {
  std::sort(edges_.begin(), edges_.end());
  validate();
}

CorridorTopology CorridorTopology::chain(std::vector<std::string> node_ids,
                                         std::span<const double> lengths_miles) {
  if (lengths_miles.size() + 1 != node_ids.size()) {
    throw DataError("chain topology needs exactly one length per consecutive node pair");
  }
  std::vector<Edge> edges;
  std::map<Edge, double> lengths;
  for (std::size_t i = 0; i + 1 < node_ids.size(); ++i) {
    const int a = static_cast<int>(i);
    const int b = a + 1;
    edges.push_back({a, b});
    edges.push_back({b, a});
    lengths[{a, b}] = lengths_miles[i];
    lengths[{b, a}] = lengths_miles[i];
  }
  return CorridorTopology(std::move(node_ids), std::move(edges), std::move(lengths));
}

void CorridorTopology::validate() const {
  const int n = node_count();
  if (n < 1) throw DataError("topology has no nodes");
  std::set<std::string> unique(node_ids_.begin(), node_ids_.end());
  if (unique.size() != node_ids_.size()) throw DataError("duplicate node id in topology");

  std::set<Edge> seen;
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw DataError("edge " + edge_name(node_ids_, e) + " references an unknown node");
    }
    if (e.from == e.to) throw DataError("self-loop on node " + node_ids_[e.from]);
    if (!seen.insert(e).second) throw DataError("duplicate edge " + edge_name(node_ids_, e));
  }
  for (const Edge& e : edges_) {
    const Edge rev{e.to, e.from};
    if (!seen.contains(rev)) {
      throw DataError("missing reverse edge " + edge_name(node_ids_, rev) + " for edge " +
                      edge_name(node_ids_, e));
    }
    auto it = lengths_.find(e);
    if (it == lengths_.end()) throw DataError("no link length for edge " + edge_name(node_ids_, e));
    if (!(it->second > 0.0) || !std::isfinite(it->second)) {
      throw DataError("link length for edge " + edge_name(node_ids_, e) + " must be positive");
    }
    auto rit = lengths_.find(rev);
    if (rit == lengths_.end() || rit->second != it->second) {
      throw DataError("link length of " + edge_name(node_ids_, e) + " differs from its reverse");
    }
  }
  if (lengths_.size() != edges_.size()) throw DataError("link length given for a non-edge");
}

double CorridorTopology::link_length(Edge e) const {
  auto it = lengths_.find(e);
  if (it == lengths_.end()) throw DataError("no such edge " + edge_name(node_ids_, e));
  return it->second;
}

int CorridorTopology::index_of(const std::string& id) const {
  auto it = std::find(node_ids_.begin(), node_ids_.end(), id);
  if (it == node_ids_.end()) throw DataError("unknown node id '" + id + "'");
  return static_cast<int>(it - node_ids_.begin());
}

std::string CorridorTopology::to_text() const {
  std::ostringstream out;
  out << "nodes:";
  for (const auto& id : node_ids_) out << ' ' << id;
  out << '\n';
  for (const Edge& e : edges_) {
    if (e.from > e.to) continue;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, lengths_.at(e));
    out << "link " << node_ids_[e.from] << ' ' << node_ids_[e.to] << ' '
        << std::string_view(buf, res.ptr - buf) << '\n';
  }
  return out.str();
}

CorridorTopology parse_topology(std::string_view text) {
  std::vector<std::string> nodes;
  bool have_nodes = false;
  std::vector<Edge> edges;
  std::map<Edge, double> lengths;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = "topology line " + std::to_string(line_no) + ": ";

    if (line.compare(first, 6, "nodes:") == 0) {
      if (have_nodes) throw DataError(where + "duplicate 'nodes:' header");
      nodes = split_ws(std::string_view(line).substr(first + 6));
      have_nodes = true;
      continue;
    }
    auto toks = split_ws(line);
    if (toks[0] != "link") {
      throw DataError(where + "expected 'nodes:' or 'link', got '" + toks[0] + "'");
    }
    if (!have_nodes) throw DataError(where + "'link' before 'nodes:' header");
    if (toks.size() != 4) throw DataError(where + "expected 'link <id_i> <id_j> <miles>'");

    auto find = [&](const std::string& id) {
      auto it = std::find(nodes.begin(), nodes.end(), id);
      if (it == nodes.end()) throw DataError(where + "unknown node id '" + id + "'");
      return static_cast<int>(it - nodes.begin());
    };
    const int a = find(toks[1]);
    const int b = find(toks[2]);
    double miles = 0.0;
    auto [ptr, ec] = std::from_chars(toks[3].data(), toks[3].data() + toks[3].size(), miles);
    if (ec != std::errc{} || ptr != toks[3].data() + toks[3].size()) {
      throw DataError(where + "bad link length '" + toks[3] + "'");
    }
    if (lengths.contains({a, b})) throw DataError(where + "duplicate link " + toks[1] + "-" + toks[2]);
    edges.push_back({a, b});
    edges.push_back({b, a});
    lengths[{a, b}] = miles;
    lengths[{b, a}] = miles;
  }
  if (!have_nodes) throw DataError("topology: missing 'nodes:' header");
  return CorridorTopology(std::move(nodes), std::move(edges), std::move(lengths));
}

CorridorTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open topology file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

double edge_weight(double length_miles, double speed_mph, double speed_floor_mph) {
  return 3600.0 * length_miles / std::max(speed_mph, speed_floor_mph);
}

GraphSnapshot build_snapshot(const CorridorTopology& topology, long timestep,
                             const std::map<Edge, double>& speeds_mph, Matrix features,
                             double speed_floor_mph) {
  const int n = topology.node_count();
  if (features.rows() != n) {
    throw DataError("feature matrix has " + std::to_string(features.rows()) + " rows, topology has " +
                    std::to_string(n) + " nodes");
  }
  GraphSnapshot snap;
  snap.timestep = timestep;
  snap.weights = Matrix::Zero(n, n);
  for (const Edge& e : topology.edges()) {
    auto it = speeds_mph.find(e);
    if (it == speeds_mph.end()) {
      throw DataError("missing speed for edge (" + topology.node_ids()[e.from] + ", " +
                      topology.node_ids()[e.to] + ") at minute " + std::to_string(timestep));
    }
    snap.weights(e.from, e.to) = edge_weight(topology.link_length(e), it->second, speed_floor_mph);
  }
  snap.node_features = std::move(features);
  return snap;
}

std::vector<MultiGraphWindow> stack_window(std::span<const GraphSnapshot> snapshots, int lookback,
                                           int horizon, std::span<const Matrix> targets,
                                           Warnings* warnings) {
  if (lookback < 1 || horizon < 0) throw DataError("lookback must be >= 1 and horizon >= 0");
  if (targets.size() != snapshots.size()) {
    throw DataError("target stream length differs from snapshot stream length");
  }
  const long total = static_cast<long>(snapshots.size());
  std::vector<MultiGraphWindow> windows;
  if (total < lookback + horizon) {
    warn(warnings, "stream of " + std::to_string(total) + " minutes is shorter than lookback + horizon (" +
                       std::to_string(lookback + horizon) + "); no windows");
    return windows;
  }
  for (long i = 1; i < total; ++i) {
    if (snapshots[i].timestep != snapshots[i - 1].timestep + 1) {
      throw DataError("snapshot stream is not consecutive at minute " +
                      std::to_string(snapshots[i].timestep));
    }
  }
  windows.reserve(total - lookback - horizon + 1);
  for (long end = lookback - 1; end + horizon < total; ++end) {
    MultiGraphWindow w;
    w.snapshots = snapshots.subspan(end - lookback + 1, lookback);
    w.target = targets[end + horizon];
    w.horizon = horizon;
    w.lookback = lookback;
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace mgcnn
