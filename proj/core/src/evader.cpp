#include "tnrisk/evader.hpp"

#include "tnrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace tnrisk {

namespace {

// Local choice distribution at node u: softmax of -lambda * (w + c_v - c_u)
// over usable out-edges, max-shifted. Returns (edge index, probability).
std::vector<std::pair<std::size_t, double>> local_choices(const ActivityNetwork& network,
                                                          const CostToEnd& costs, std::size_t u,
                                                          double lambda) {
  std::vector<std::pair<std::size_t, double>> out;
  const double cu = costs[u];
  if (is_blocked(cu)) return out;
  for (std::size_t e : network.out_edges(u)) {
    const auto& edge = network.edges()[e];
    if (!edge.traversable() || is_blocked(costs[edge.to])) continue;
    out.emplace_back(e, -lambda * (edge.weight + costs[edge.to] - cu));
  }
  if (out.empty()) return out;
  double shift = out.front().second;
  for (const auto& [e, x] : out) shift = std::max(shift, x);
  double z = 0.0;
  for (auto& [e, x] : out) {
    x = std::exp(x - shift);
    z += x;
  }
  for (auto& [e, x] : out) x /= z;
  return out;
}

}  // namespace

std::size_t EvaderChain::index_of(const NodeId& id) const {
  const auto it = std::find(states.begin(), states.end(), id);
  if (it == states.end()) throw Error(ErrorKind::InvalidArgument, "state not in chain: " + id.label());
  return static_cast<std::size_t>(it - states.begin());
}

double EvaderChain::probability(std::size_t from, std::size_t to) const {
  for (const auto& [v, p] : rows.at(from)) {
    if (v == to) return p;
  }
  return 0.0;
}

EvaderChain transition_matrix(const ActivityNetwork& network, const CostToEnd& costs,
                              double lambda) {
  if (!std::isfinite(lambda) || lambda < 0) {
    throw Error(ErrorKind::InvalidArgument, "lambda must be finite and non-negative");
  }
  if (costs.values.size() != network.node_count()) {
    throw Error(ErrorKind::InvalidArgument, "costs were computed on a different network");
  }
  EvaderChain chain;
  const std::size_t n = network.node_count();
  chain.states.assign(network.nodes().begin(), network.nodes().end());
  chain.rows.assign(n, {});
  chain.dead.assign(n, false);
  chain.initial.assign(n, 0.0);
  chain.order.assign(network.topological_order().begin(), network.topological_order().end());
  chain.absorbing = network.end_index();
  chain.lambda = lambda;

  for (std::size_t u = 0; u < n; ++u) {
    if (u == chain.absorbing) {
      chain.rows[u].emplace_back(u, 1.0);
      continue;
    }
    for (const auto& [e, p] : local_choices(network, costs, u, lambda)) {
      chain.rows[u].emplace_back(network.edges()[e].to, p);
    }
    chain.dead[u] = chain.rows[u].empty();
  }

  if (const ModelParams* params = network.params()) {
    const double total = params->total_supply();
    for (std::size_t u = 0; u < n; ++u) {
      if (chain.states[u].kind != NodeKind::source || total <= 0) continue;
      const auto it = params->supply.find(chain.states[u].code);
      if (it != params->supply.end()) chain.initial[u] = it->second / total;
    }
  }
  return chain;
}

double AttackMatrix::at(const CountryCode& source, const CountryCode& target) const {
  const auto si = std::lower_bound(sources.begin(), sources.end(), source);
  const auto tj = std::lower_bound(targets.begin(), targets.end(), target);
  if (si == sources.end() || *si != source || tj == targets.end() || *tj != target) return 0.0;
  return plots[si - sources.begin()][tj - targets.begin()];
}

double AttackMatrix::abandoned_by(const CountryCode& source) const {
  const auto si = std::lower_bound(sources.begin(), sources.end(), source);
  if (si == sources.end() || *si != source) return 0.0;
  return abandoned[si - sources.begin()];
}

AttackMatrix attack_matrix(const EvaderChain& chain, const CodeMap& supply) {
  AttackMatrix m;
  std::vector<std::size_t> source_states;
  std::map<CountryCode, std::size_t> target_column;
  std::optional<std::size_t> attack;
  std::optional<std::size_t> abandon;
  for (std::size_t u = 0; u < chain.states.size(); ++u) {
    const auto& s = chain.states[u];
    switch (s.kind) {
      case NodeKind::source: source_states.push_back(u); break;
      case NodeKind::staged: m.targets.push_back(s.code); break;
      case NodeKind::attack: attack = u; break;
      case NodeKind::abandon: abandon = u; break;
      case NodeKind::end: break;
    }
  }
  std::sort(source_states.begin(), source_states.end(),
            [&](std::size_t a, std::size_t b) { return chain.states[a].code < chain.states[b].code; });
  std::sort(m.targets.begin(), m.targets.end());
  for (std::size_t j = 0; j < m.targets.size(); ++j) target_column[m.targets[j]] = j;

  std::size_t positive = 0;
  for (const auto& [code, s] : supply) {
    if (s < 0 || !std::isfinite(s)) {
      throw Error(ErrorKind::SupplyMismatch, "supply for " + code.str() + " is not a finite non-negative number");
    }
    if (s > 0) ++positive;
  }
  for (std::size_t u : source_states) {
    const auto it = supply.find(chain.states[u].code);
    if (it == supply.end() || !(it->second > 0)) {
      throw Error(ErrorKind::SupplyMismatch, "no positive supply for source " + chain.states[u].code.str());
    }
  }
  if (positive != source_states.size()) {
    throw Error(ErrorKind::SupplyMismatch, "supply has sources that are not in the network");
  }

  // Position of each state in topological order, for a single forward sweep.
  const std::size_t n = chain.states.size();
  std::vector<std::size_t> rank(n);
  for (std::size_t k = 0; k < chain.order.size(); ++k) rank[chain.order[k]] = k;

  for (std::size_t u : source_states) {
    const CountryCode& code = chain.states[u].code;
    const double s = supply.at(code);
    m.sources.push_back(code);
    m.supply.push_back(s);
    m.total_plots += s;
    std::vector<double> row(m.targets.size(), 0.0);
    double abandoned = 0.0;
    if (chain.dead[u]) {
      m.dead_sources.push_back(code);
    } else {
      std::vector<double> mass(n, 0.0);
      mass[u] = 1.0;
      for (std::size_t k = rank[u]; k < chain.order.size(); ++k) {
        const std::size_t v = chain.order[k];
        if (mass[v] == 0.0 || v == chain.absorbing) continue;
        for (const auto& [w, p] : chain.rows[v]) {
          const double flow = mass[v] * p;
          mass[w] += flow;
          if (attack && w == *attack && chain.states[v].kind == NodeKind::staged) {
            row[target_column.at(chain.states[v].code)] += s * flow;
          }
          if (abandon && w == *abandon) abandoned += s * flow;
        }
      }
    }
    m.plots.push_back(std::move(row));
    m.abandoned.push_back(abandoned);
  }
  return m;
}

TargetTotals target_totals(const AttackMatrix& matrix) {
  TargetTotals totals;
  for (std::size_t j = 0; j < matrix.targets.size(); ++j) {
    double column = 0.0;
    for (const auto& row : matrix.plots) column += row[j];
    totals.per_target[matrix.targets[j]] = column;
    totals.grand_total += column;
  }
  return totals;
}

std::string path_key(const NodePath& path) {
  for (const auto& node : path) {
    if (node.kind == NodeKind::staged) return node.code.str();
    if (node.kind == NodeKind::abandon) return "abandon";
  }
  return "other";
}

std::map<NodePath, double> enumerate_path_distribution(const ActivityNetwork& network,
                                                       const CostToEnd& costs,
                                                       const NodeId& source, double lambda) {
  const std::size_t start = network.index_of(source);
  if (is_blocked(costs[start])) {
    throw Error(ErrorKind::DeadSource, source.label() + " cannot reach the end node");
  }
  std::map<NodePath, double> out;
  NodePath path{source};
  // Explicit recursion depth is bounded by the (acyclic) node count.
  auto visit = [&](auto&& self, std::size_t u, double probability) -> void {
    if (u == network.end_index()) {
      out[path] += probability;
      return;
    }
    for (const auto& [e, p] : local_choices(network, costs, u, lambda)) {
      const std::size_t v = network.edges()[e].to;
      path.push_back(network.node(v));
      self(self, v, probability * p);
      path.pop_back();
    }
  };
  visit(visit, start, 1.0);
  return out;
}

std::map<std::string, double> aggregate_by_key(const std::map<NodePath, double>& paths) {
  std::map<std::string, double> out;
  for (const auto& [path, p] : paths) out[path_key(path)] += p;
  return out;
}

double PathSample::frequency(const NodePath& path) const {
  const auto it = counts.find(path);
  if (it == counts.end() || draws == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(draws);
}

std::map<std::string, double> PathSample::frequencies_by_key() const {
  std::map<std::string, double> out;
  for (const auto& [path, count] : counts) {
    out[path_key(path)] += static_cast<double>(count) / static_cast<double>(draws);
  }
  return out;
}

PathSample sample_paths(const EvaderChain& chain, const NodeId& source, std::size_t n,
                        std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  const std::size_t start = chain.index_of(source);
  if (chain.dead[start]) throw Error(ErrorKind::DeadSource, source.label() + " is dead");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Walks are counted as state-index sequences and converted once at the end.
  std::map<std::vector<std::size_t>, std::size_t> tally;
  std::vector<std::size_t> walk;
  for (std::size_t draw = 0; draw < n; ++draw) {
    walk.assign(1, start);
    std::size_t u = start;
    while (u != chain.absorbing) {
      const auto& row = chain.rows[u];
      if (row.empty()) {
        throw Error(ErrorKind::DeadSource, "walk reached dead state " + chain.states[u].label());
      }
      const double r = unit(rng);
      double cumulative = 0.0;
      std::size_t next = row.back().first;  // guards against rounding at the top end
      for (const auto& [v, p] : row) {
        cumulative += p;
        if (r < cumulative) {
          next = v;
          break;
        }
      }
      u = next;
      walk.push_back(u);
    }
    ++tally[walk];
  }

  PathSample sample;
  sample.draws = n;
  for (const auto& [indices, count] : tally) {
    NodePath path;
    for (std::size_t i : indices) path.push_back(chain.states[i]);
    sample.counts[std::move(path)] += count;
  }
  return sample;
}

Solution solve(const ModelParams& params) {
  ActivityNetwork network = build_network(params);
  CostToEnd costs = least_cost_to_end(network);
  const CostToEnd check = least_cost_to_end_dag(network);
  if (check.values != costs.values) {
    throw Error(ErrorKind::InvalidArgument, "least-cost solvers disagree");
  }
  EvaderChain chain = transition_matrix(network, costs, params.lambda);
  AttackMatrix matrix = attack_matrix(chain, params.supply);
  std::vector<std::string> warnings;
  for (const auto& code : matrix.dead_sources) {
    warnings.push_back(fmt::format("source {} has no usable option and contributes no plots", code.str()));
  }
  return {std::move(network), std::move(costs), std::move(chain), std::move(matrix),
          std::move(warnings)};
}

}  // namespace tnrisk
