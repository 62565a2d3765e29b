#include "tnrisk/network.hpp"

#include "tnrisk/csv.hpp"
#include "tnrisk/error.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include <fmt/format.h>

namespace tnrisk {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::source: return "source";
    case NodeKind::staged: return "staged";
    case NodeKind::attack: return "attack";
    case NodeKind::abandon: return "abandon";
    case NodeKind::end: return "end";
  }
  return "unknown";
}

std::string NodeId::label() const {
  if (code.empty()) return std::string(to_string(kind));
  return fmt::format("{}({})", to_string(kind), code.str());
}

ActivityNetwork::ActivityNetwork(std::vector<NodeId> nodes, std::vector<Edge> edges,
                                 std::shared_ptr<const ModelParams> params)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), params_(std::move(params)) {
  const std::size_t n = nodes_.size();
  std::map<NodeId, std::size_t> seen;
  std::optional<std::size_t> end;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen.emplace(nodes_[i], i).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate node " + nodes_[i].label());
    }
    if (nodes_[i].kind == NodeKind::end) end = i;
  }
  if (!end) throw Error(ErrorKind::InvalidArgument, "network has no End node");
  end_ = *end;

  out_.assign(n, {});
  in_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (edge.from >= n || edge.to >= n) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("edge {} has a dangling endpoint", e));
    }
    out_[edge.from].push_back(e);
    in_[edge.to].push_back(e);
  }

  // Kahn's algorithm; a stable min-index queue keeps the order deterministic.
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& edge : edges_) ++indegree[edge.to];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const std::size_t u = ready.top();
    ready.pop();
    topo_.push_back(u);
    for (std::size_t e : out_[u]) {
      if (--indegree[edges_[e].to] == 0) ready.push(edges_[e].to);
    }
  }
  if (topo_.size() != n) throw Error(ErrorKind::InvalidArgument, "activity network has a cycle");
}

std::optional<std::size_t> ActivityNetwork::find(const NodeId& id) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t ActivityNetwork::index_of(const NodeId& id) const {
  const auto index = find(id);
  if (!index) throw Error(ErrorKind::InvalidArgument, "node not in network: " + id.label());
  return *index;
}

std::optional<std::size_t> ActivityNetwork::find_edge(std::size_t from, std::size_t to) const {
  for (std::size_t e : out_.at(from)) {
    if (edges_[e].to == to) return e;
  }
  return std::nullopt;
}

std::vector<CountryCode> ActivityNetwork::sources() const {
  std::vector<CountryCode> out;
  for (const auto& node : nodes_) {
    if (node.kind == NodeKind::source) out.push_back(node.code);
  }
  return out;
}

std::vector<CountryCode> ActivityNetwork::targets() const {
  std::vector<CountryCode> out;
  for (const auto& node : nodes_) {
    if (node.kind == NodeKind::staged) out.push_back(node.code);
  }
  return out;
}

std::vector<CountryCode> ActivityNetwork::isolated_sources() const {
  std::vector<CountryCode> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind != NodeKind::source) continue;
    const bool any = std::any_of(out_[i].begin(), out_[i].end(),
                                 [&](std::size_t e) { return edges_[e].traversable(); });
    if (!any) out.push_back(nodes_[i].code);
  }
  return out;
}

ActivityNetwork build_network(const ModelParams& params) {
  const auto sources = params.sources();
  const auto targets = params.targets();
  if (targets.empty()) throw Error(ErrorKind::EmptyTargets, "no country has both I and Y defined");

  std::vector<NodeId> nodes;
  nodes.reserve(sources.size() + targets.size() + 3);
  for (const auto& s : sources) nodes.push_back(NodeId::source(s));
  for (const auto& t : targets) nodes.push_back(NodeId::staged(t));
  const std::size_t attack = nodes.size();
  nodes.push_back(NodeId::attack());
  const std::size_t abandon = nodes.size();
  nodes.push_back(NodeId::abandon());
  const std::size_t end = nodes.size();
  nodes.push_back(NodeId::end());

  const std::size_t first_target = sources.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      edges.push_back({i, first_target + j, params.barrier(sources[i], targets[j])});
    }
  }
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const double stage = params.interception.at(targets[j]) + params.yield.at(targets[j]);
    edges.push_back({first_target + j, attack, stage});
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    edges.push_back({i, abandon, is_blocked(params.abandon) ? kBlocked : params.abandon});
  }
  edges.push_back({attack, end, 0.0});
  edges.push_back({abandon, end, 0.0});

  return ActivityNetwork(std::move(nodes), std::move(edges),
                         std::make_shared<const ModelParams>(params));
}

std::vector<double> bellman_ford_to_sink(std::size_t node_count, std::span<const Edge> edges,
                                         std::size_t sink) {
  std::vector<double> dist(node_count, kBlocked);
  dist.at(sink) = 0.0;
  auto relax_all = [&] {
    bool changed = false;
    for (const auto& e : edges) {
      if (!e.traversable() || is_blocked(dist[e.to])) continue;
      const double candidate = e.weight + dist[e.to];
      if (candidate < dist[e.from]) {
        dist[e.from] = candidate;
        changed = true;
      }
    }
    return changed;
  };
  for (std::size_t round = 1; round < node_count; ++round) {
    if (!relax_all()) return dist;
  }
  if (relax_all()) throw Error(ErrorKind::NegativeCycle, "negative cycle reaches the end node");
  return dist;
}

CostToEnd least_cost_to_end(const ActivityNetwork& network) {
  return {bellman_ford_to_sink(network.node_count(), network.edges(), network.end_index())};
}

CostToEnd least_cost_to_end_dag(const ActivityNetwork& network) {
  std::vector<double> dist(network.node_count(), kBlocked);
  dist[network.end_index()] = 0.0;
  const auto order = network.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t u = *it;
    for (std::size_t e : network.out_edges(u)) {
      const auto& edge = network.edges()[e];
      if (!edge.traversable() || is_blocked(dist[edge.to])) continue;
      dist[u] = std::min(dist[u], edge.weight + dist[edge.to]);
    }
  }
  return {std::move(dist)};
}

double path_cost(const ActivityNetwork& network, std::span<const NodeId> path) {
  if (path.size() < 2) throw Error(ErrorKind::NotAPath, "a path needs at least two nodes");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto from = network.find(path[k]);
    const auto to = network.find(path[k + 1]);
    const auto edge = (from && to) ? network.find_edge(*from, *to) : std::nullopt;
    if (!edge) {
      throw Error(ErrorKind::NotAPath,
                  fmt::format("no edge {} -> {}", path[k].label(), path[k + 1].label()));
    }
    const auto& e = network.edges()[*edge];
    if (!e.traversable()) {
      throw Error(ErrorKind::BlockedEdgeOnPath,
                  fmt::format("edge {} -> {} is blocked", path[k].label(), path[k + 1].label()));
    }
    total += e.weight;
  }
  return total;
}

std::string format_edge_list(const ActivityNetwork& network) {
  std::string out = csv_line({"from_kind", "from_code", "to_kind", "to_code", "weight"});
  for (const auto& e : network.edges()) {
    const auto& from = network.node(e.from);
    const auto& to = network.node(e.to);
    out += csv_line({std::string(to_string(from.kind)), from.code.str(), std::string(to_string(to.kind)),
                     to.code.str(), format_number(e.weight)});
  }
  return out;
}

}  // namespace tnrisk
