#include "commands.hpp"

#include <tnrisk/csv.hpp>
#include <tnrisk/dataset.hpp>
#include <tnrisk/error.hpp>
#include <tnrisk/estimation.hpp>
#include <tnrisk/report.hpp>
#include <tnrisk/scenario.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace tnrisk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string mode_name(Mode mode) { return mode == Mode::estimate ? "estimate" : "pre"; }

Mode parse_mode(const std::string& text) {
  if (text == "estimate") return Mode::estimate;
  if (text == "pre") return Mode::pre_estimated;
  throw UsageError("mode must be 'estimate' or 'pre', got '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw UsageError("format must be 'csv' or 'json', got '" + text + "'");
}

double require_number(const std::string& text, const std::string& flag) {
  const auto v = parse_finite(text);
  if (!v) throw UsageError(flag + " expects a finite number, got '" + text + "'");
  return *v;
}

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void write_metadata(const RunConfig& config, const std::string& command, json extra = json::object()) {
  json doc = {{"command", command}, {"params", config_to_json(config)}};
  for (auto& [key, value] : extra.items()) doc[key] = value;
  write_json(config.output_dir / "metadata.json", doc);
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& out) {
  for (const auto& w : warnings) out << "warning: " << w << '\n';
}

void write_matrix(const RunConfig& config, const std::string& stem, const AttackMatrix& matrix) {
  if (config.format == OutputFormat::json) {
    write_json(config.output_dir / (stem + ".json"), attack_matrix_json(matrix, config_to_json(config)));
    return;
  }
  write_text_file(config.output_dir / (stem + ".csv"), format_attack_matrix(matrix));
}

ScenarioSpec resolve_spec(const std::string& spec) {
  if (spec.empty() || spec == "empty") return ScenarioSpec{"empty", {}, {}, {}, {}, {}};
  if (spec == "homegrown") return homegrown_spec();
  if (spec.starts_with("fortress-")) {
    const std::string code = spec.substr(9);
    if (!CountryCode::is_valid(code)) throw UsageError("fortress needs a three-letter code: " + spec);
    return fortress_spec(CountryCode(code));
  }
  return load_scenario(spec);
}

// Sampled path frequencies next to the exact ones, one row per source and
// outcome. Each source gets its own stream derived from the run seed.
std::string monte_carlo_check(const Solution& solution, const RunConfig& config) {
  std::string out = csv_line({"source", "outcome", "exact", "sampled"});
  const auto& chain = solution.chain;
  std::size_t stream = 0;
  for (const auto& node : chain.states) {
    if (node.kind != NodeKind::source) continue;
    const std::size_t index = chain.index_of(node);
    if (chain.dead[index]) continue;
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(stream++)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    const std::uint64_t seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    const auto exact = aggregate_by_key(
        enumerate_path_distribution(solution.network, solution.costs, node, chain.lambda));
    const auto sampled = sample_paths(chain, node, config.mc_samples, seed).frequencies_by_key();
    for (const auto& [key, p] : exact) {
      const auto it = sampled.find(key);
      out += csv_line({node.code.str(), key, format_number(p),
                       format_number(it == sampled.end() ? 0.0 : it->second)});
    }
  }
  return out;
}

}  // namespace

SupportWeights parse_weights(const std::string& text) {
  if (text == "default" || text == "standard") return SupportWeights::standard();
  if (text == "high" || text == "high_commitment") return SupportWeights::high_commitment();
  if (text == "low" || text == "low_commitment") return SupportWeights::low_commitment();
  std::vector<double> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto v = parse_finite(item);
    if (!v) throw UsageError("weights must be default, high, low or r,s,o; got '" + text + "'");
    parts.push_back(*v);
  }
  if (parts.size() != 3) throw UsageError("weights triple needs exactly three values: '" + text + "'");
  SupportWeights w{parts[0], parts[1], parts[2]};
  try {
    w.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return w;
}

double parse_abandon(const std::string& text) {
  const auto v = parse_cost(text);
  if (!v) throw UsageError("abandon expects a number or 'inf', got '" + text + "'");
  return *v;
}

json config_to_json(const RunConfig& config) {
  return {{"data", config.data_dir.generic_string()},
          {"mode", mode_name(config.mode)},
          {"lambda", config.lambda},
          {"abandon", json_number(config.abandon)},
          {"weights", config.weights_preset},
          {"support_weights", {config.weights.rarely, config.weights.sometimes, config.weights.often}},
          {"q", config.plot_factor},
          {"out", config.output_dir.generic_string()},
          {"format", config.format == OutputFormat::json ? "json" : "csv"},
          {"seed", config.seed},
          {"mc_samples", config.mc_samples}};
}

RunConfig config_from_json(const json& doc, RunConfig base) {
  const json& p = doc.contains("params") && doc["params"].is_object() ? doc["params"] : doc;
  if (!p.is_object()) throw UsageError("config must be a JSON object");
  auto text = [&](const char* key) -> std::optional<std::string> {
    if (!p.contains(key)) return std::nullopt;
    if (p[key].is_string()) return p[key].get<std::string>();
    if (p[key].is_number()) return p[key].dump();
    throw UsageError(std::string("config field '") + key + "' has the wrong type");
  };
  try {
    if (auto v = text("data")) base.data_dir = *v;
    if (auto v = text("mode")) base.mode = parse_mode(*v);
    if (p.contains("lambda")) base.lambda = p["lambda"].get<double>();
    if (auto v = text("abandon")) base.abandon = parse_abandon(*v);
    if (auto v = text("weights")) {
      base.weights_preset = *v;
      base.weights = parse_weights(*v);
    }
    if (p.contains("q")) base.plot_factor = p["q"].get<double>();
    if (auto v = text("out")) base.output_dir = *v;
    if (auto v = text("format")) base.format = parse_format(*v);
    if (p.contains("seed")) base.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("mc_samples")) base.mc_samples = p["mc_samples"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  return base;
}

PlotData plot_data(const AttackMatrix& matrix) {
  PlotData plot;
  for (const auto& row : matrix.plots) {
    for (double v : row) plot.normalization = std::max(plot.normalization, v);
  }
  for (std::size_t i = 0; i < matrix.sources.size(); ++i) {
    for (std::size_t j = 0; j < matrix.targets.size(); ++j) {
      const double v = matrix.plots[i][j];
      if (!(v > 0)) continue;
      plot.circles.push_back({matrix.sources[i], matrix.targets[j], v, v / plot.normalization});
    }
  }
  return plot;
}

std::string format_plot_data(const PlotData& plot) {
  std::string out = csv_line({"source", "target", "value", "relative_area"});
  for (const auto& c : plot.circles) {
    out += csv_line({c.source.str(), c.target.str(), format_number(c.value), format_number(c.relative_area)});
  }
  return out;
}

ModelParams load_params(const RunConfig& config, std::vector<std::string>* warnings) {
  if (config.mode == Mode::pre_estimated) {
    ModelParams params = load_pre_estimated(config.data_dir);
    params.lambda = config.lambda;
    params.abandon = config.abandon;
    params.plot_factor = config.plot_factor;
    return params;
  }
  const DataBundle bundle = load_bundle(config.data_dir);
  Estimate estimate = estimate_params(
      bundle, {config.weights, config.plot_factor, config.lambda, config.abandon});
  if (warnings) {
    warnings->insert(warnings->end(), estimate.warnings.begin(), estimate.warnings.end());
  }
  return std::move(estimate.params);
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const DataBundle bundle = load_bundle(config.data_dir);
  if (config.mode == Mode::pre_estimated && !bundle.pre_estimated) {
    // Raises MissingFile naming the absent tables.
    load_pre_estimated(config.data_dir);
  }
  const ValidationReport report = validate_bundle(bundle);
  write_text_file(config.output_dir / "validation_report.txt", format_validation_report(report));
  write_metadata(config, "validate", {{"issues", report.issues.size()}});
  for (const auto& issue : report.issues) {
    out << to_string(issue.kind) << ' ' << issue.location << ": " << issue.message << '\n';
  }
  out << fmt::format("{} issue(s)\n", report.issues.size());
  return report.empty() ? kExitOk : kExitDomain;
}

int cmd_estimate(const RunConfig& config, std::ostream& out) {
  const DataBundle bundle = load_bundle(config.data_dir);
  Estimate estimate = estimate_params(
      bundle, {config.weights, config.plot_factor, config.lambda, config.abandon});
  report_warnings(estimate.warnings, out);
  write_pre_estimated(config.output_dir, estimate.params);

  const std::vector<SupportWeights> presets{SupportWeights::standard(), SupportWeights::high_commitment(),
                                            SupportWeights::low_commitment()};
  const auto rows = supply_sensitivity(impute_survey(bundle.countries), presets, config.plot_factor);
  std::string table = csv_line({"code", "supply", "high_commitment_pct", "low_commitment_pct"});
  for (const auto& r : rows) {
    table += csv_line({r.code.str(), format_number(r.baseline), format_number(r.percent_change[1]),
                       format_number(r.percent_change[2])});
  }
  write_text_file(config.output_dir / "supply_sensitivity.csv", table);
  write_metadata(config, "estimate");
  out << fmt::format("estimated {} sources, {} targets, {} barrier entries\n",
                     estimate.params.sources().size(), estimate.params.targets().size(),
                     estimate.params.barriers.size());
  return kExitOk;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  std::vector<std::string> warnings;
  const ModelParams params = load_params(config, &warnings);
  const Solution solution = solve(params);
  warnings.insert(warnings.end(), solution.warnings.begin(), solution.warnings.end());
  report_warnings(warnings, out);

  const AttackMatrix& matrix = solution.matrix;
  const TargetTotals totals = target_totals(matrix);
  const PlotData plot = plot_data(matrix);
  write_matrix(config, "attack_matrix", matrix);
  if (config.format == OutputFormat::csv) {
    write_text_file(config.output_dir / "abandoned.csv", format_abandoned(matrix));
    write_text_file(config.output_dir / "target_totals.csv", format_target_totals(totals));
    write_text_file(config.output_dir / "plot_data.csv", format_plot_data(plot));
  } else {
    json circles = json::array();
    for (const auto& c : plot.circles) {
      circles.push_back({{"source", c.source.str()}, {"target", c.target.str()},
                         {"value", c.value}, {"relative_area", c.relative_area}});
    }
    write_json(config.output_dir / "plot_data.json",
               {{"params", config_to_json(config)}, {"normalization", plot.normalization},
                {"circles", std::move(circles)}});
  }
  if (config.mc_samples > 0) {
    write_text_file(config.output_dir / "monte_carlo_check.csv", monte_carlo_check(solution, config));
  }

  json summary = {{"grand_total", totals.grand_total}, {"total_plots", matrix.total_plots}};
  if (!totals.per_target.empty() && totals.grand_total > 0) {
    const auto top = std::max_element(totals.per_target.begin(), totals.per_target.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
    summary["top_target"] = top->first.str();
    summary["top_share"] = top->second / totals.grand_total;
    out << fmt::format("grand total {:.1f} of {:.1f} plots; top target {} ({:.1f}%)\n", totals.grand_total,
                       matrix.total_plots, top->first.str(), 100.0 * top->second / totals.grand_total);
  } else {
    out << fmt::format("grand total {:.1f} of {:.1f} plots\n", totals.grand_total, matrix.total_plots);
  }
  write_metadata(config, "solve", {{"summary", summary}});
  return kExitOk;
}

int cmd_scenario(const RunConfig& config, const std::string& spec_text, std::ostream& out) {
  const ScenarioSpec spec = resolve_spec(spec_text);
  std::vector<std::string> warnings;
  const ModelParams base = load_params(config, &warnings);
  const ModelParams alt = apply_scenario(base, spec);
  const Solution base_solution = solve(base);
  const Solution alt_solution = solve(alt);
  report_warnings(warnings, out);

  const DeltaMatrix delta = diff_matrices(base_solution.matrix, alt_solution.matrix);
  write_matrix(config, "base_matrix", base_solution.matrix);
  write_matrix(config, "alt_matrix", alt_solution.matrix);
  write_text_file(config.output_dir / "delta.csv", format_delta(delta));
  write_text_file(config.output_dir / "ranked_gainers.csv", format_ranked_gainers(delta));
  write_json(config.output_dir / "scenario.json", scenario_to_json(spec));

  const double base_total = target_totals(base_solution.matrix).grand_total;
  const double alt_total = target_totals(alt_solution.matrix).grand_total;
  write_metadata(config, "scenario",
                 {{"scenario", scenario_to_json(spec)},
                  {"summary", {{"base_total", base_total}, {"alt_total", alt_total}}}});
  out << fmt::format("scenario {}: total {:.1f} -> {:.1f}\n", spec.name, base_total, alt_total);
  for (std::size_t k = 0; k < std::min<std::size_t>(5, delta.ranked.size()); ++k) {
    out << fmt::format("  {}. {} {:+.1f}\n", k + 1, delta.ranked[k].target.str(), delta.ranked[k].delta);
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, double a_min, double a_max, double step, double fraction,
              std::ostream& out) {
  if (!(a_min < a_max) || !(step > 0)) throw UsageError("sweep needs --a-min < --a-max and --step > 0");
  if (!(fraction > 0 && fraction < 1)) throw UsageError("--fraction must lie in (0, 1)");
  const ModelParams params = load_params(config);
  const auto grid = sweep_grid(a_min, a_max, step);
  const SweepCurve curve = deterrence_sweep(params, grid, config.lambda);
  write_text_file(config.output_dir / "sweep.csv", format_sweep(curve));

  json sweep = {{"a_min", a_min}, {"a_max", a_max}, {"step", step}, {"fraction", fraction}};
  try {
    const Threshold t = find_threshold(curve, fraction);
    const json result = {{"A_star", t.abandon}, {"fraction", t.fraction}, {"level", t.level}};
    write_json(config.output_dir / "threshold.json", result);
    write_metadata(config, "sweep", {{"sweep", sweep}, {"threshold", result}});
    out << fmt::format("threshold A* = {:.3f} at {:.0f}% of max\n", t.abandon, 100 * fraction);
    return kExitOk;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ThresholdOutOfRange) throw;
    write_metadata(config, "sweep", {{"sweep", sweep}, {"threshold", nullptr}});
    throw;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transnational terrorism risk engine"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data, mode, lambda, abandon, weights, q, output, format, config_path;
  std::uint64_t seed = 1;
  std::size_t mc_samples = 0;
  std::vector<CLI::Option*> flags;
  auto* o_data = app.add_option("--data", data, "Data directory");
  auto* o_mode = app.add_option("--mode", mode, "estimate | pre");
  auto* o_lambda = app.add_option("--lambda", lambda, "Rationality (default 0.1)");
  auto* o_abandon = app.add_option("--abandon", abandon, "Abandon yield A, or inf");
  auto* o_weights = app.add_option("--weights", weights, "default | high | low | r,s,o");
  auto* o_q = app.add_option("--q", q, "Plot conversion factor Q");
  auto* o_out = app.add_option("--out", output, "Output directory");
  auto* o_format = app.add_option("--format", format, "csv | json");
  auto* o_seed = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* o_mc = app.add_option("--mc-samples", mc_samples, "Monte Carlo draws per source (0: off)");
  app.add_option("--config", config_path, "Replay a metadata.json parameter echo");

  auto* validate = app.add_subcommand("validate", "Check a data directory");
  auto* estimate = app.add_subcommand("estimate", "Estimate parameters from raw data");
  auto* solve_cmd = app.add_subcommand("solve", "Solve the baseline attack matrix");
  auto* scenario = app.add_subcommand("scenario", "Compare a scenario against the baseline");
  std::string spec = "empty";
  scenario->add_option("--spec", spec, "fortress-XXX | homegrown | empty | path to JSON")->required();
  auto* sweep = app.add_subcommand("sweep", "Sweep the abandon yield A");
  double a_min = kDefaultSweepMin, a_max = kDefaultSweepMax, step = kDefaultSweepStep;
  double fraction = kDefaultThresholdFraction;
  sweep->add_option("--a-min", a_min, "Lowest A");
  sweep->add_option("--a-max", a_max, "Highest A");
  sweep->add_option("--step", step, "Grid step");
  sweep->add_option("--fraction", fraction, "Threshold fraction of the maximum");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      json doc;
      try {
        doc = json::parse(read_text_file(config_path));
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("cannot parse config: ") + e.what());
      }
      config = config_from_json(doc);
    }
    if (o_data->count()) config.data_dir = data;
    if (o_mode->count()) config.mode = parse_mode(mode);
    if (o_lambda->count()) config.lambda = require_number(lambda, "--lambda");
    if (o_abandon->count()) config.abandon = parse_abandon(abandon);
    if (o_weights->count()) {
      config.weights = parse_weights(weights);
      config.weights_preset = weights;
    }
    if (o_q->count()) config.plot_factor = require_number(q, "--q");
    if (o_out->count()) config.output_dir = output;
    if (o_format->count()) config.format = parse_format(format);
    if (o_seed->count()) config.seed = seed;
    if (o_mc->count()) config.mc_samples = mc_samples;
    if (config.lambda < 0) throw UsageError("--lambda must be >= 0");
    if (!(config.plot_factor > 0)) throw UsageError("--q must be > 0");

    if (validate->parsed()) return cmd_validate(config, out);
    if (estimate->parsed()) return cmd_estimate(config, out);
    if (solve_cmd->parsed()) return cmd_solve(config, out);
    if (scenario->parsed()) return cmd_scenario(config, spec, out);
    if (sweep->parsed()) return cmd_sweep(config, a_min, a_max, step, fraction, out);
    err << "error: no command\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_io_error(e.kind()) ? kExitUsage : kExitDomain;
  }
}

}  // namespace tnrisk::cli
