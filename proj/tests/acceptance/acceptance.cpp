// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and never tuned at run time.

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <tnrisk/csv.hpp>
#include <tnrisk/dataset.hpp>
#include <tnrisk/error.hpp>
#include <tnrisk/estimation.hpp>
#include <tnrisk/evader.hpp>
#include <tnrisk/scenario.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace {

using namespace tnrisk;
using tnrisk::testing::bundled_data_dir;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!! ") + std::move(note));
  }
  void info(std::string note) { notes.push_back(std::move(note)); }
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0: no limit
  std::function<void(Outcome&)> body;
};

const CountryCode kUsa("USA");

const ModelParams& published() {
  static const ModelParams p = load_pre_estimated(bundled_data_dir());
  return p;
}

std::vector<double> finite_off_diagonal(const BarrierMatrix& t) {
  std::vector<double> out;
  for (const auto& [pair, v] : t) {
    if (pair.first != pair.second && !is_blocked(v)) out.push_back(v);
  }
  return out;
}

std::vector<double> values(const CodeMap& m) {
  std::vector<double> out;
  for (const auto& [code, v] : m) out.push_back(v);
  return out;
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

CountryRecord synthetic_target(int k, double sec, double gdp) {
  CountryRecord c;
  c.code = tnrisk::testing::synthetic_code(k);
  c.name = c.code.str();
  c.region = "r";
  c.population = 1e6 * (k + 1);
  c.sec_fraction = sec;
  c.gdp_usd = gdp;
  c.is_target = true;
  c.is_oecd = true;
  return c;
}

/// Complete raw bundle with random gravity inputs; every country is a target.
DataBundle synthetic_bundle(std::mt19937_64& rng, int n, double pop_scale = 1.0, double sec_scale = 1.0,
                            double gdp_scale = 1.0) {
  std::uniform_real_distribution<double> sec(0.005, 0.03);
  std::uniform_real_distribution<double> gdp(1e10, 2e13);
  std::uniform_real_distribution<double> pop(1e6, 3e8);
  std::uniform_real_distribution<double> dist(200, 15000);
  std::uniform_real_distribution<double> mig(10, 1e6);
  DataBundle b;
  for (int k = 0; k < n; ++k) {
    auto c = synthetic_target(k, sec(rng) * sec_scale, gdp(rng) * gdp_scale);
    c.population = pop(rng) * pop_scale;
    b.countries.push_back(c);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = dist(rng);
      b.distances.insert(b.countries[i].code, b.countries[j].code, d);
      b.distances.insert(b.countries[j].code, b.countries[i].code, d);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) b.migration.insert(b.countries[i].code, b.countries[j].code, mig(rng));
    }
  }
  return b;
}

void normalization_fidelity(Outcome& o) {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const DataBundle b = synthetic_bundle(rng, 4 + trial % 9);
    const auto t = finite_off_diagonal(estimate_barriers(b).costs);
    const auto i = values(estimate_interception(b.countries));
    const auto y = values(estimate_yield(b.countries));
    for (double err : {std::abs(min_of(t)), std::abs(median(t) - 1.0), std::abs(min_of(i)),
                       std::abs(median(i) - 1.0), std::abs(max_of(y)), std::abs(median(y) + 1.0)}) {
      worst = std::max(worst, err);
    }
  }
  o.check(worst <= 1e-9, fmt::format("synthetic estimator outputs: worst |(min, median) - target| = {:.3g}", worst));

  const auto t = finite_off_diagonal(published().barriers);
  const auto i = values(published().interception);
  const auto y = values(published().yield);
  o.check(std::abs(median(t) - 1.0) <= 0.05,
          fmt::format("bundled T: {} finite off-diagonal entries, min {}, median {} (want 1 +/- 0.05)", t.size(),
                      min_of(t), median(t)));
  o.check(std::abs(median(i) - 1.0) <= 0.05 && std::abs(min_of(i)) <= 0.05,
          fmt::format("bundled I: min {}, median {}", min_of(i), median(i)));
  o.check(std::abs(median(y) + 1.0) <= 0.05 && std::abs(max_of(y)) <= 0.05,
          fmt::format("bundled Y: max {}, median {}", max_of(y), median(y)));
}

void spot_checks(Outcome& o) {
  const auto& p = published();
  auto exact = [&](const char* label, double got, double want) {
    o.check(got == want, fmt::format("{} = {} (want {})", label, format_number(got), format_number(want)));
  };
  exact("I[AUS]", p.interception.at(CountryCode("AUS")), 0.0);
  exact("I[NZL]", p.interception.at(CountryCode("NZL")), 2.3);
  exact("Y[USA]", p.yield.at(kUsa), -54.0);
  exact("Y[JPN]", p.yield.at(CountryCode("JPN")), -24.1);
  exact("T[AFG][FRA]", p.barrier(CountryCode("AFG"), CountryCode("FRA")), 1.9);
  const double pse = p.barrier(CountryCode("PSE"), CountryCode("JPN"));
  o.check(is_blocked(pse), fmt::format("T[PSE][JPN] = {} (want BLOCKED)", format_number(pse)));
}

void softmax_odds(Outcome& o) {
  ModelParams p;
  const CountryCode s("SRC"), a("AAA"), b("BBB");
  p.supply[s] = 1.0;
  p.interception[a] = 0.0;
  p.yield[a] = -20.0;
  p.interception[b] = 10.0;
  p.yield[b] = -20.0;
  p.set_barrier(s, a, 0.0);
  p.set_barrier(s, b, 0.0);
  const auto net = build_network(p);
  const auto chain = transition_matrix(net, least_cost_to_end(net), 0.1);
  const auto src = chain.index_of(NodeId::source(s));
  const double odds = chain.probability(src, chain.index_of(NodeId::staged(a))) /
                      chain.probability(src, chain.index_of(NodeId::staged(b)));
  o.check(std::abs(odds - std::exp(1.0)) <= 1e-12,
          fmt::format("odds {:.15f}, |odds - e| = {:.3g}", odds, std::abs(odds - std::exp(1.0))));
}

void oracle_triangle(Outcome& o) {
  std::mt19937_64 rng(4242);
  const std::size_t draws = 100000;
  double worst = 0.0;
  std::size_t cells = 0, inside = 0, instances = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const ModelParams p = tnrisk::testing::random_instance(rng, {5, 6, 0.2});
    const auto net = build_network(p);
    const auto costs = least_cost_to_end(net);
    const auto chain = transition_matrix(net, costs, p.lambda);
    const auto m = attack_matrix(chain, p.supply);
    ++instances;
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
      const NodeId src = NodeId::source(m.sources[i]);
      if (chain.dead[chain.index_of(src)]) continue;
      const auto exact = aggregate_by_key(enumerate_path_distribution(net, costs, src, p.lambda));
      for (const auto& [key, prob] : exact) {
        const double marginal =
            (key == "abandon" ? m.abandoned[i] : m.at(m.sources[i], CountryCode(key))) / m.supply[i];
        worst = std::max(worst, std::abs(marginal - prob));
      }
      const auto sampled =
          sample_paths(chain, src, draws, 77 + static_cast<std::uint64_t>(trial) * 16 + i).frequencies_by_key();
      for (const auto& [key, prob] : exact) {
        const auto it = sampled.find(key);
        const double f = it == sampled.end() ? 0.0 : it->second;
        const double band = 3.0 * std::sqrt(prob * (1.0 - prob) / static_cast<double>(draws));
        ++cells;
        if (std::abs(f - prob) <= band) ++inside;
      }
    }
  }
  o.check(worst <= 1e-10,
          fmt::format("{} instances: max |attack_matrix - enumeration| = {:.3g}", instances, worst));
  const double share = static_cast<double>(inside) / static_cast<double>(cells);
  o.check(share >= 0.95, fmt::format("Monte Carlo: {}/{} path cells inside 3-sigma ({:.1f}%)", inside, cells,
                                     100.0 * share));
}

void baseline_dominance(Outcome& o) {
  ModelParams p = published();
  p.lambda = 0.1;
  p.abandon = kBlocked;
  const auto solution = solve(p);
  const auto totals = target_totals(solution.matrix);
  const auto top = std::max_element(totals.per_target.begin(), totals.per_target.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; });
  o.check(top->first == kUsa, "largest per-target total: " + top->first.str());
  std::size_t checked = 0;
  std::vector<std::string> not_usa;
  for (const auto& s : solution.matrix.sources) {
    const auto plans = tnrisk::testing::enumerate_plan_costs(p, s);
    if (plans.empty()) continue;
    const auto best = std::min_element(plans.begin(), plans.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    ++checked;
    if (best->first != "USA") not_usa.push_back(s.str() + "->" + best->first);
  }
  o.check(not_usa.empty(), fmt::format("least-cost plan is USA for {}/{} sources with an open plan{}",
                                       checked - not_usa.size(), checked,
                                       not_usa.empty() ? "" : " (" + fmt::format("{}", fmt::join(not_usa, ", ")) + ")"));
  o.info(fmt::format("{} sources have no open plan and send no plots: {}", solution.matrix.dead_sources.size(),
                     [&] {
                       std::string s;
                       for (const auto& c : solution.matrix.dead_sources) s += (s.empty() ? "" : " ") + c.str();
                       return s;
                     }()));
  const double share = totals.per_target.at(kUsa) / totals.grand_total;
  o.check(share > 0.5, fmt::format("USA share of attacks = {:.4f}", share));
}

void fortress_substitution(Outcome& o) {
  const auto base = solve(published()).matrix;
  const auto alt = solve(fortress(published(), kUsa)).matrix;
  const auto delta = diff_matrices(base, alt);
  double usa_column = 0.0;
  for (std::size_t i = 0; i < alt.sources.size(); ++i) {
    if (alt.sources[i] != kUsa) usa_column = std::max(usa_column, std::abs(alt.at(alt.sources[i], kUsa)));
  }
  o.check(usa_column == 0.0, fmt::format("max |N[i][USA]| after fortress = {}", usa_column));
  double most_negative = 0.0;
  for (const auto& t : delta.per_target) {
    if (t.target != kUsa) most_negative = std::min(most_negative, t.delta);
  }
  o.check(most_negative >= 0.0, fmt::format("smallest non-USA total change = {}", most_negative));
  std::string top;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, delta.ranked.size()); ++k) {
    top += fmt::format("{}{} {:+.1f}", k ? ", " : "", delta.ranked[k].target.str(), delta.ranked[k].delta);
  }
  o.check(delta.ranked.front().target.str() == "JPN", "top gainers: " + top);
}

void homegrown_collapse(Outcome& o) {
  const double base = target_totals(solve(published()).matrix).grand_total;
  const auto alt = solve(homegrown(published())).matrix;
  double off_diagonal = 0.0;
  for (std::size_t i = 0; i < alt.sources.size(); ++i) {
    for (std::size_t j = 0; j < alt.targets.size(); ++j) {
      if (alt.sources[i] != alt.targets[j]) off_diagonal = std::max(off_diagonal, alt.plots[i][j]);
    }
  }
  o.check(off_diagonal == 0.0, fmt::format("max off-diagonal entry = {}", off_diagonal));
  const double total = target_totals(alt).grand_total;
  o.check(total < base, fmt::format("grand total {} vs baseline {}", format_number(total), format_number(base)));
}

bool sigmoid_shaped(const std::vector<double>& total, double tolerance) {
  std::vector<double> d;
  for (std::size_t k = 1; k < total.size(); ++k) d.push_back(total[k] - total[k - 1]);
  const auto peak = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
  for (std::size_t k = 1; k <= peak; ++k) {
    if (d[k] < d[k - 1] - tolerance) return false;
  }
  for (std::size_t k = peak + 1; k < d.size(); ++k) {
    if (d[k] > d[k - 1] + tolerance) return false;
  }
  return true;
}

void deterrence_curve(Outcome& o) {
  const auto grid = sweep_grid(-60, 10, 1);
  const auto curve = deterrence_sweep(published(), grid, 0.1);
  bool monotone = true;
  for (std::size_t k = 1; k < curve.total.size(); ++k) monotone &= curve.total[k] >= curve.total[k - 1];
  o.check(monotone, "grand total nondecreasing over A in [-60, 10]");
  o.check(sigmoid_shaped(curve.total, 1e-9 * curve.supply_total), "first differences rise then fall");
  const auto t = find_threshold(curve);
  o.check(t.abandon > -54.0 && t.abandon < -6.8, fmt::format("A* = {:.3f} at fraction {}", t.abandon, t.fraction));

  ModelParams single;
  const CountryCode s("SRC"), target("TGT");
  single.supply[s] = 100.0;
  single.interception[target] = 1.5;
  single.yield[target] = -54.0;
  single.set_barrier(s, target, 0.2);
  const double c = 0.2 + (1.5 + -54.0);
  const auto fixture = deterrence_sweep(single, grid, 0.1);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    worst = std::max(worst, std::abs(fixture.total[k] - tnrisk::testing::two_option_sigmoid(100.0, c, grid[k], 0.1)));
  }
  const double midpoint = find_threshold(fixture).abandon;
  o.check(std::abs(midpoint - c) <= 1.0,
          fmt::format("synthetic fixture A* = {:.4f}, closed-form midpoint {} (max curve error {:.2g})", midpoint,
                      c, worst));
}

void estimation_properties(Outcome& o) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::mt19937_64 a(500 + trial), b(500 + trial);
    const DataBundle base = synthetic_bundle(a, 7);
    DataBundle scaled = synthetic_bundle(b, 7, 3.0, 17.0, 1e-3);  // rescaled populations, SEC and GDP
    const auto ti = estimate_barriers(base).costs, tj = estimate_barriers(scaled).costs;
    for (const auto& [pair, v] : ti) {
      if (!is_blocked(v)) worst = std::max(worst, std::abs(tj.at(pair) - v));
    }
    const auto ii = estimate_interception(base.countries), ij = estimate_interception(scaled.countries);
    const auto yi = estimate_yield(base.countries), yj = estimate_yield(scaled.countries);
    for (const auto& [code, v] : ii) worst = std::max(worst, std::abs(ij.at(code) - v));
    for (const auto& [code, v] : yi) worst = std::max(worst, std::abs(yj.at(code) - v));
  }
  o.check(worst <= 1e-9, fmt::format("scale invariance of T, I, Y: max deviation {:.3g}", worst));

  CountryRecord equal;
  equal.code = CountryCode("EQL");
  equal.region = "r";
  equal.population = 1e6;
  equal.muslim_pop = 1e6;
  equal.survey = SurveyFractions{0.2, 0.2, 0.2, 0.2};
  const std::vector<SupportWeights> presets{SupportWeights::standard(), SupportWeights::high_commitment(),
                                            SupportWeights::low_commitment()};
  const auto eq = supply_sensitivity(std::vector{equal}, presets, kDefaultPlotFactor);
  o.check(std::abs(eq[0].percent_change[1] + 25.7) <= 0.1,
          fmt::format("equal fractions, high commitment: {:.3f}%", eq[0].percent_change[1]));

  const auto countries = impute_survey(load_country_table(bundled_data_dir() / kCountriesFile));
  const auto rows = supply_sensitivity(countries, presets, kDefaultPlotFactor);
  const auto idn = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.code.str() == "IDN"; });
  o.check(idn != rows.end() && std::abs(idn->percent_change[1] + 46.2) <= 0.05 &&
              std::abs(idn->percent_change[2] - 24.6) <= 0.05,
          idn == rows.end() ? "IDN missing"
                            : fmt::format("IDN: supply {:.1f}, high {:.2f}%, low {:+.2f}%", idn->baseline,
                                          idn->percent_change[1], idn->percent_change[2]));
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    out[entry.path().filename().string()] = read_text_file(entry.path());
  }
  return out;
}

void determinism(Outcome& o) {
  tnrisk::testing::TempDir out;
  const std::string command = fmt::format("\"{}\" solve --data \"{}\" --out \"{}\" --mc-samples 500 --seed 9 > /dev/null",
                                          TNRISK_CLI_PATH, bundled_data_dir().string(), out.path().string());
  const int first = std::system(command.c_str());
  const auto a = snapshot(out.path());
  const int second = std::system(command.c_str());
  const auto b = snapshot(out.path());
  o.check(first == 0 && second == 0, fmt::format("exit statuses {} and {}", first, second));
  o.check(!a.empty() && a == b, fmt::format("{} output files byte-identical across runs", a.size()));
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "normalization fidelity", 1.0, normalization_fidelity},
      {2, "published value spot checks", 0, spot_checks},
      {3, "softmax odds", 0, softmax_odds},
      {4, "oracle triangle", 30.0, oracle_triangle},
      {5, "baseline dominance", 0, baseline_dominance},
      {6, "fortress substitution", 5.0, fortress_substitution},
      {7, "home-grown collapse", 0, homegrown_collapse},
      {8, "deterrence curve", 0, deterrence_curve},
      {9, "estimation properties", 0, estimation_properties},
      {10, "determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0) {
      o.check(elapsed < c.time_limit_s, fmt::format("runtime {:.3f} s (limit {} s)", elapsed, c.time_limit_s));
    }
    std::cout << fmt::format("AC{:<2} {} {} ({:.2f} s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, elapsed);
    for (const auto& note : o.notes) std::cout << "       " << note << '\n';
    failures += o.pass ? 0 : 1;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
