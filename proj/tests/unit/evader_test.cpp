#include "support/oracles.hpp"

#include <tnrisk/error.hpp>
#include <tnrisk/evader.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace tnrisk {
namespace {

using testing::synthetic_code;

/// One source (AAA) facing targets whose complete plan costs are `costs`
/// (T = 0, Y = 0, I = cost). Costs must be >= 0.
ModelParams fan(const std::vector<double>& costs, double supply = 100.0, double abandon = kBlocked) {
  ModelParams p;
  const CountryCode s("SRC");
  p.supply[s] = supply;
  for (std::size_t k = 0; k < costs.size(); ++k) {
    const auto t = synthetic_code(static_cast<int>(k));
    p.interception[t] = costs[k];
    p.yield[t] = 0.0;
    p.set_barrier(s, t, 0.0);
  }
  p.abandon = abandon;
  return p;
}

EvaderChain chain_for(const ModelParams& p) {
  const auto net = build_network(p);
  return transition_matrix(net, least_cost_to_end(net), p.lambda);
}

double source_probability(const EvaderChain& chain, const NodeId& from, const NodeId& to) {
  return chain.probability(chain.index_of(from), chain.index_of(to));
}

const NodeId kSrc = NodeId::source(CountryCode("SRC"));

TEST(Transition, EqualCostsSplitEvenly) {
  const auto chain = chain_for(fan({3.0, 3.0}));
  EXPECT_NEAR(source_probability(chain, kSrc, NodeId::staged(synthetic_code(0))), 0.5, 1e-15);
  EXPECT_NEAR(source_probability(chain, kSrc, NodeId::staged(synthetic_code(1))), 0.5, 1e-15);
}

TEST(Transition, LambdaZeroIsUniform) {
  auto p = fan({0.0, 7.0, 30.0}, 100.0, 4.0);
  p.lambda = 0.0;
  const auto chain = chain_for(p);
  const auto& row = chain.rows[chain.index_of(kSrc)];
  ASSERT_EQ(row.size(), 4u);
  for (const auto& [v, prob] : row) EXPECT_EQ(prob, 0.25);
}

TEST(Transition, CostGapOfTenGivesOddsOfE) {
  const auto chain = chain_for(fan({0.0, 10.0}));
  const double cheap = source_probability(chain, kSrc, NodeId::staged(synthetic_code(0)));
  const double dear = source_probability(chain, kSrc, NodeId::staged(synthetic_code(1)));
  EXPECT_NEAR(cheap / dear, std::exp(1.0), 1e-12);
}

TEST(Transition, RowsAreStochasticAndFollowTraversableEdges) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = testing::random_instance(rng);
    const auto net = build_network(p);
    const auto chain = transition_matrix(net, least_cost_to_end(net), p.lambda);
    for (std::size_t u = 0; u < chain.states.size(); ++u) {
      if (chain.dead[u]) {
        EXPECT_TRUE(chain.rows[u].empty());
        continue;
      }
      double sum = 0.0;
      for (const auto& [v, prob] : chain.rows[u]) {
        sum += prob;
        EXPECT_GT(prob, 0.0);
        if (u == chain.absorbing) continue;
        const auto e = net.find_edge(u, v);
        ASSERT_TRUE(e.has_value());
        EXPECT_TRUE(net.edges()[*e].traversable());
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Transition, LargeLambdaDoesNotOverflow) {
  ModelParams p;
  const CountryCode s("SRC"), t("TGT");
  p.supply[s] = 1;
  p.interception[t] = 0;
  p.yield[t] = -54;
  p.set_barrier(s, t, 0);
  p.abandon = 60;
  p.lambda = 50;
  const auto chain = chain_for(p);
  const double attack = source_probability(chain, kSrc, NodeId::staged(t));
  EXPECT_TRUE(std::isfinite(attack));
  EXPECT_NEAR(attack, 1.0, 1e-12);
}

TEST(Transition, InitialDistributionFollowsSupply) {
  ModelParams p = fan({1.0});
  p.supply[CountryCode("OTH")] = 300.0;
  p.set_barrier(CountryCode("OTH"), synthetic_code(0), 0.0);
  const auto chain = chain_for(p);
  EXPECT_EQ(chain.initial[chain.index_of(kSrc)], 0.25);
  EXPECT_EQ(chain.initial[chain.index_of(NodeId::source(CountryCode("OTH")))], 0.75);
}

TEST(AttackMatrix, SingleOption) {
  const auto p = fan({2.0});
  const auto m = attack_matrix(chain_for(p), p.supply);
  EXPECT_EQ(m.at(CountryCode("SRC"), synthetic_code(0)), 100.0);
  EXPECT_EQ(m.abandoned_by(CountryCode("SRC")), 0.0);
}

TEST(AttackMatrix, SymmetricOptions) {
  const auto p = fan({2.0, 2.0});
  const auto m = attack_matrix(chain_for(p), p.supply);
  EXPECT_NEAR(m.at(CountryCode("SRC"), synthetic_code(0)), 50.0, 1e-12);
  EXPECT_NEAR(m.at(CountryCode("SRC"), synthetic_code(1)), 50.0, 1e-12);
}

TEST(AttackMatrix, EgyptLikeTwoOptionSoftmax) {
  ModelParams p;
  const CountryCode egy("EGY"), usa("USA"), fra("FRA");
  p.supply[egy] = 1.0;
  p.interception[usa] = 1.5;
  p.yield[usa] = -54.0;
  p.interception[fra] = 1.0;
  p.yield[fra] = -6.8;
  p.set_barrier(egy, usa, 0.2);  // plan cost -52.3
  p.set_barrier(egy, fra, 1.5);  // plan cost -4.3
  const auto m = attack_matrix(chain_for(p), p.supply);
  // Hand evaluation: 1 / (1 + e^-4.8) = 0.991837...
  EXPECT_NEAR(m.at(egy, usa), 1.0 / (1.0 + std::exp(-4.8)), 1e-12);
  EXPECT_NEAR(m.at(egy, usa), 0.9918, 1e-4);
}

TEST(AttackMatrix, SupplyMismatch) {
  const auto p = fan({1.0});
  CodeMap wrong = p.supply;
  wrong[CountryCode("XXX")] = 5.0;
  EXPECT_THROW(attack_matrix(chain_for(p), wrong), Error);
  CodeMap missing;
  try {
    attack_matrix(chain_for(p), missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SupplyMismatch);
  }
}

TEST(AttackMatrix, ConservationAndDeadSources) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = testing::random_instance(rng);
    const auto m = attack_matrix(chain_for(p), p.supply);
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
      double total = m.abandoned[i];
      for (double v : m.plots[i]) {
        EXPECT_GE(v, 0.0);
        total += v;
      }
      const bool dead = std::find(m.dead_sources.begin(), m.dead_sources.end(), m.sources[i]) !=
                        m.dead_sources.end();
      EXPECT_NEAR(total, dead ? 0.0 : m.supply[i], 1e-9 * std::max(1.0, m.supply[i]));
      EXPECT_EQ(dead, is_blocked(testing::closed_form_cost(p, m.sources[i])));
    }
  }
}

TEST(TargetTotals, ColumnSums) {
  AttackMatrix m;
  m.sources = {CountryCode("AAA"), CountryCode("BBB")};
  m.targets = {CountryCode("USA")};
  m.plots = {{60.0}, {40.0}};
  m.abandoned = {5.0, 0.0};
  const auto t = target_totals(m);
  EXPECT_EQ(t.per_target.at(CountryCode("USA")), 100.0);
  EXPECT_EQ(t.grand_total, 100.0);
}

TEST(PathDistribution, ThreePathSoftmax) {
  const auto p = fan({0.0, 10.0, 20.0});
  const auto net = build_network(p);
  const auto dist = aggregate_by_key(enumerate_path_distribution(net, least_cost_to_end(net), kSrc, 0.1));
  const auto oracle = testing::softmax({0.0, 10.0, 20.0}, 0.1);
  ASSERT_EQ(dist.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(dist.at(synthetic_code(k).str()), oracle[k], 1e-14);
  EXPECT_NEAR(dist.at("AAA"), 0.6652, 1e-4);
  EXPECT_NEAR(dist.at("AAB"), 0.2447, 1e-4);
  EXPECT_NEAR(dist.at("AAC"), 0.0900, 1e-4);
}

TEST(PathDistribution, FullPathsAndDeadSource) {
  auto p = fan({1.0, 1.0});
  const auto net = build_network(p);
  const auto paths = enumerate_path_distribution(net, least_cost_to_end(net), kSrc, 0.1);
  const NodePath first{kSrc, NodeId::staged(synthetic_code(0)), NodeId::attack(), NodeId::end()};
  EXPECT_NEAR(paths.at(first), 0.5, 1e-15);

  p.set_barrier(CountryCode("SRC"), synthetic_code(0), kBlocked);
  p.set_barrier(CountryCode("SRC"), synthetic_code(1), kBlocked);
  const auto dead = build_network(p);
  try {
    enumerate_path_distribution(dead, least_cost_to_end(dead), kSrc, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DeadSource);
  }
  EXPECT_THROW(sample_paths(chain_for(p), kSrc, 10, 1), Error);
}

TEST(PathDistribution, ShiftInvariance) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams p = testing::random_instance(rng);
    ModelParams shifted = p;
    const double k = 13.0;
    for (auto& [pair, t] : shifted.barriers) {
      if (!is_blocked(t)) t += k;
    }
    if (!is_blocked(shifted.abandon)) shifted.abandon += k;
    // Domestic plans get the shift through T_ii as well.
    const auto net = build_network(p);
    const auto net2 = build_network(shifted);
    for (const auto& s : net.sources()) {
      if (is_blocked(testing::closed_form_cost(p, s))) continue;
      const auto a = aggregate_by_key(enumerate_path_distribution(net, least_cost_to_end(net), NodeId::source(s), p.lambda));
      const auto b = aggregate_by_key(enumerate_path_distribution(net2, least_cost_to_end(net2), NodeId::source(s), p.lambda));
      ASSERT_EQ(a.size(), b.size());
      for (const auto& [key, prob] : a) EXPECT_NEAR(b.at(key), prob, 1e-12);
    }
  }
}

TEST(PathDistribution, MonotoneInOwnCost) {
  std::vector<double> costs{2.0, 5.0, 9.0, 14.0};
  const auto base = testing::softmax(costs, 0.1);
  auto p = fan(costs);
  const auto net = build_network(p);
  const auto before = aggregate_by_key(enumerate_path_distribution(net, least_cost_to_end(net), kSrc, 0.1));
  p.interception[synthetic_code(1)] += 3.0;
  const auto net2 = build_network(p);
  const auto after = aggregate_by_key(enumerate_path_distribution(net2, least_cost_to_end(net2), kSrc, 0.1));
  for (int k = 0; k < 4; ++k) {
    const auto key = synthetic_code(k).str();
    EXPECT_NEAR(before.at(key), base[k], 1e-14);
    if (k == 1) {
      EXPECT_LT(after.at(key), before.at(key));
    } else {
      EXPECT_GE(after.at(key), before.at(key));
    }
  }
}

TEST(PathDistribution, LambdaLimits) {
  auto p = fan({3.0, 4.0, 8.0}, 100.0, 5.0);
  const auto net = build_network(p);
  const auto costs = least_cost_to_end(net);
  const auto sharp = aggregate_by_key(enumerate_path_distribution(net, costs, kSrc, 50.0));
  EXPECT_NEAR(sharp.at("AAA"), 1.0, 1e-6);
  const auto flat = aggregate_by_key(enumerate_path_distribution(net, costs, kSrc, 0.0));
  for (const auto& [key, prob] : flat) EXPECT_EQ(prob, 0.25) << key;
}

TEST(Sampler, SinglePathAndDeterminism) {
  const auto single = chain_for(fan({1.0}));
  const auto one = sample_paths(single, kSrc, 1, 42);
  ASSERT_EQ(one.counts.size(), 1u);
  EXPECT_EQ(one.counts.begin()->second, 1u);
  EXPECT_EQ(one.frequencies_by_key().at("AAA"), 1.0);

  const auto chain = chain_for(fan({0.0, 10.0, 20.0}));
  const auto a = sample_paths(chain, kSrc, 5000, 123);
  const auto b = sample_paths(chain, kSrc, 5000, 123);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_THROW(sample_paths(chain, kSrc, 0, 1), Error);
}

TEST(Sampler, ThreePathBinomialBands) {
  const auto chain = chain_for(fan({0.0, 10.0, 20.0}));
  const std::size_t n = 100000;
  const auto freq = sample_paths(chain, kSrc, n, 2718).frequencies_by_key();
  const auto oracle = testing::softmax({0.0, 10.0, 20.0}, 0.1);
  for (int k = 0; k < 3; ++k) {
    const double p = oracle[k];
    EXPECT_NEAR(freq.at(synthetic_code(k).str()), p, 3.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(OracleTriangle, AnalyticRoutesAgree) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = testing::random_instance(rng);
    const auto net = build_network(p);
    const auto costs = least_cost_to_end(net);
    const auto chain = transition_matrix(net, costs, p.lambda);
    const auto m = attack_matrix(chain, p.supply);
    const auto fundamental = testing::fundamental_matrix_allocation(chain, p.supply);
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
      const auto& s = m.sources[i];
      if (is_blocked(testing::closed_form_cost(p, s))) continue;
      const auto paths = aggregate_by_key(enumerate_path_distribution(net, costs, NodeId::source(s), p.lambda));
      const auto softmax = testing::softmax_plan_distribution(p, s);
      ASSERT_EQ(paths.size(), softmax.size());
      for (const auto& [key, prob] : softmax) {
        EXPECT_NEAR(paths.at(key), prob, 1e-10);
        const double n = key == "abandon" ? m.abandoned[i] : m.at(s, CountryCode(key));
        EXPECT_NEAR(n / m.supply[i], prob, 1e-10) << key;
        EXPECT_NEAR(fundamental.at(s).at(key) / m.supply[i], prob, 1e-10) << key;
      }
    }
  }
}

TEST(Solve, WarnsAboutDeadSources) {
  auto p = fan({1.0});
  p.supply[CountryCode("DED")] = 10.0;
  const auto solution = solve(p);
  EXPECT_EQ(solution.matrix.dead_sources, std::vector<CountryCode>{CountryCode("DED")});
  ASSERT_EQ(solution.warnings.size(), 1u);
  EXPECT_NE(solution.warnings[0].find("DED"), std::string::npos);
  EXPECT_EQ(solution.matrix.total_plots, 110.0);
}

}  // namespace
}  // namespace tnrisk
