#pragma once

#include "tnrisk/network.hpp"
#include "tnrisk/params.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tnrisk {

/// Guided-evader absorbing chain over the nodes of one network. Rows are
/// sparse: each entry is (successor index, probability).
struct EvaderChain {
  using Row = std::vector<std::pair<std::size_t, double>>;

  std::vector<NodeId> states;
  std::vector<Row> rows;
  std::vector<bool> dead;           // non-End states with no usable out-edge
  std::vector<double> initial;      // proportional to S_i over Source states
  std::vector<std::size_t> order;   // topological order of states
  std::size_t absorbing = 0;        // End
  double lambda = kDefaultLambda;

  std::size_t index_of(const NodeId& id) const;
  double probability(std::size_t from, std::size_t to) const;
};

/// M_uv = exp(-lambda (w_uv + c_v - c_u)) / Z_u over traversable edges whose
/// head can reach End. Exponents are shifted by their row maximum first.
/// When the network carries parameters, `initial` is S_i / sum S.
EvaderChain transition_matrix(const ActivityNetwork& network, const CostToEnd& costs,
                              double lambda);

struct AttackMatrix {
  std::vector<CountryCode> sources;
  std::vector<CountryCode> targets;
  std::vector<double> supply;                // S_i, aligned with sources
  std::vector<std::vector<double>> plots;    // [source][target]
  std::vector<double> abandoned;             // aligned with sources
  std::vector<CountryCode> dead_sources;
  double total_plots = 0.0;                  // sum of S_i

  /// Zero for pairs outside the index sets.
  double at(const CountryCode& source, const CountryCode& target) const;
  double abandoned_by(const CountryCode& source) const;
};

/// Forward probability propagation in topological order; exact on a DAG.
/// Throws SupplyMismatch unless the positive entries of `supply` are exactly
/// the chain's Source states.
AttackMatrix attack_matrix(const EvaderChain& chain, const CodeMap& supply);

struct TargetTotals {
  std::map<CountryCode, double> per_target;
  double grand_total = 0.0;  // excludes abandoned plots
};

TargetTotals target_totals(const AttackMatrix& matrix);

using NodePath = std::vector<NodeId>;

/// Reporting key of a path: its target code, or "abandon".
std::string path_key(const NodePath& path);

/// Every Source->End path with its probability (product of the local edge
/// probabilities), found by depth-first search on the network itself rather
/// than through an EvaderChain. Throws DeadSource when the source cannot reach
/// End and InvalidArgument when it is not in the network.
std::map<NodePath, double> enumerate_path_distribution(const ActivityNetwork& network,
                                                       const CostToEnd& costs,
                                                       const NodeId& source, double lambda);

std::map<std::string, double> aggregate_by_key(const std::map<NodePath, double>& paths);

struct PathSample {
  std::map<NodePath, std::size_t> counts;
  std::size_t draws = 0;

  double frequency(const NodePath& path) const;
  std::map<std::string, double> frequencies_by_key() const;
};

/// n independent walks from `source` to End. Deterministic for a fixed seed.
/// Throws DeadSource for a dead source and InvalidArgument when n == 0.
PathSample sample_paths(const EvaderChain& chain, const NodeId& source, std::size_t n,
                        std::uint64_t seed);

struct Solution {
  ActivityNetwork network;
  CostToEnd costs;
  EvaderChain chain;
  AttackMatrix matrix;
  std::vector<std::string> warnings;
};

/// build_network, least_cost_to_end (cross-checked against the DAG solver),
/// transition_matrix and attack_matrix in one call.
Solution solve(const ModelParams& params);

}  // namespace tnrisk
