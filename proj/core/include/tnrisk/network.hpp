#pragma once

#include "tnrisk/params.hpp"
#include "tnrisk/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tnrisk {

enum class NodeKind { source, staged, attack, abandon, end };

std::string_view to_string(NodeKind kind) noexcept;

/// A node of the activity network. Source and Staged nodes carry a country;
/// the Attack, Abandon and End singletons carry none.
struct NodeId {
  NodeKind kind = NodeKind::end;
  CountryCode code;

  static NodeId source(CountryCode c) { return {NodeKind::source, std::move(c)}; }
  static NodeId staged(CountryCode c) { return {NodeKind::staged, std::move(c)}; }
  static NodeId attack() { return {NodeKind::attack, {}}; }
  static NodeId abandon() { return {NodeKind::abandon, {}}; }
  static NodeId end() { return {NodeKind::end, {}}; }

  std::string label() const;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;  // BLOCKED edges are kept but never traversed

  bool traversable() const noexcept { return !is_blocked(weight); }
};

/// Immutable weighted DAG. build_network() produces the canonical layered
/// topology; the general constructor accepts any acyclic graph with a
/// single End node and is used for non-canonical experiments and tests.
class ActivityNetwork {
 public:
  /// Throws InvalidArgument on duplicate nodes, dangling edge endpoints, a
  /// missing End node, or a cycle.
  ActivityNetwork(std::vector<NodeId> nodes, std::vector<Edge> edges,
                  std::shared_ptr<const ModelParams> params = nullptr);

  std::span<const NodeId> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const NodeId& node(std::size_t index) const { return nodes_.at(index); }

  std::optional<std::size_t> find(const NodeId& id) const;
  /// Throws InvalidArgument when the node is absent.
  std::size_t index_of(const NodeId& id) const;
  std::size_t end_index() const noexcept { return end_; }

  /// Edge indices leaving / entering a node.
  std::span<const std::size_t> out_edges(std::size_t node) const { return out_.at(node); }
  std::span<const std::size_t> in_edges(std::size_t node) const { return in_.at(node); }
  std::optional<std::size_t> find_edge(std::size_t from, std::size_t to) const;

  /// Sources first, End last.
  std::span<const std::size_t> topological_order() const noexcept { return topo_; }

  std::vector<CountryCode> sources() const;
  std::vector<CountryCode> targets() const;
  /// Sources with no traversable outgoing edge.
  std::vector<CountryCode> isolated_sources() const;

  /// Parameters the network was built from; null for hand-built graphs.
  const ModelParams* params() const noexcept { return params_.get(); }

 private:
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> topo_;
  std::size_t end_ = 0;
  std::shared_ptr<const ModelParams> params_;
};

/// Canonical topology: Source(i) -> Staged(j) [T_ij], Staged(j) -> Attack
/// [I_j + Y_j], Source(i) -> Abandon [A], Attack/Abandon -> End [0].
/// Sources are codes with S_i > 0, targets codes with both I_j and Y_j.
/// Throws EmptyTargets.
ActivityNetwork build_network(const ModelParams& params);

/// Least path cost from every node to End, indexed like network.nodes().
/// BLOCKED for nodes that cannot reach End.
struct CostToEnd {
  std::vector<double> values;

  double operator[](std::size_t index) const { return values.at(index); }
  double at(const ActivityNetwork& network, const NodeId& id) const {
    return values.at(network.index_of(id));
  }
};

/// Bellman-Ford on the reversed graph (edge weights may be negative).
CostToEnd least_cost_to_end(const ActivityNetwork& network);

/// Reverse-topological dynamic programming; exact on a DAG. Used to
/// cross-check least_cost_to_end.
CostToEnd least_cost_to_end_dag(const ActivityNetwork& network);

/// Bellman-Ford shortest distances from every node to `sink` over an
/// arbitrary edge list; BLOCKED edges are ignored. Throws NegativeCycle when a
/// negative cycle can reach the sink.
std::vector<double> bellman_ford_to_sink(std::size_t node_count, std::span<const Edge> edges,
                                         std::size_t sink);

/// Sum of edge weights along `path`. Throws NotAPath or BlockedEdgeOnPath.
double path_cost(const ActivityNetwork& network, std::span<const NodeId> path);

/// Edge list CSV: from_kind,from_code,to_kind,to_code,weight.
std::string format_edge_list(const ActivityNetwork& network);

}  // namespace tnrisk
