#include "tnrisk/scenario.hpp"

#include "tnrisk/csv.hpp"
#include "tnrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace tnrisk {

namespace {

using nlohmann::json;

double cost_from_json(const json& value, const std::string& where) {
  if (value.is_number()) {
    const double v = value.get<double>();
    return is_blocked(v) ? kBlocked : v;
  }
  if (value.is_string()) {
    if (const auto parsed = parse_cost(value.get<std::string>())) return *parsed;
  }
  throw Error(ErrorKind::InvalidArgument, where + ": expected a number or \"inf\"");
}

json cost_to_json(double value) {
  if (is_blocked(value)) return "inf";
  return value;
}

CodeMap code_map_from_json(const json& value, const std::string& where) {
  if (!value.is_object()) throw Error(ErrorKind::InvalidArgument, where + " must be an object");
  CodeMap out;
  for (const auto& [key, v] : value.items()) {
    if (!CountryCode::is_valid(key)) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("{}: '{}' is not a country code", where, key));
    }
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, where + "." + key + " must be a number");
    out[CountryCode(key)] = v.get<double>();
  }
  return out;
}

std::vector<CountryCode> resolve(const std::string& pattern, const std::set<CountryCode>& known) {
  if (pattern == kWildcard) return {known.begin(), known.end()};
  if (!CountryCode::is_valid(pattern) || !known.contains(CountryCode(pattern))) {
    throw Error(ErrorKind::UnknownCode, "unknown country code in scenario: " + pattern);
  }
  return {CountryCode(pattern)};
}

}  // namespace

ScenarioSpec scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "scenario must be a JSON object");
  static const std::set<std::string> allowed = {"name", "barrier_overrides", "abandon", "lambda",
                                                "interception_overrides", "yield_overrides"};
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) throw Error(ErrorKind::InvalidArgument, "unknown scenario field: " + key);
  }
  ScenarioSpec spec;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw Error(ErrorKind::InvalidArgument, "name must be a string");
    spec.name = doc["name"].get<std::string>();
  }
  if (doc.contains("barrier_overrides")) {
    const auto& list = doc["barrier_overrides"];
    if (!list.is_array()) throw Error(ErrorKind::InvalidArgument, "barrier_overrides must be an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& item = list[k];
      const std::string where = fmt::format("barrier_overrides[{}]", k);
      if (!item.is_object() || !item.contains("origin") || !item.contains("dest") ||
          !item.contains("cost") || !item["origin"].is_string() || !item["dest"].is_string()) {
        throw Error(ErrorKind::InvalidArgument, where + " needs string origin, dest and a cost");
      }
      spec.barrier_overrides.push_back({item["origin"].get<std::string>(),
                                        item["dest"].get<std::string>(),
                                        cost_from_json(item["cost"], where)});
    }
  }
  if (doc.contains("abandon")) spec.abandon = cost_from_json(doc["abandon"], "abandon");
  if (doc.contains("lambda")) {
    if (!doc["lambda"].is_number()) throw Error(ErrorKind::InvalidArgument, "lambda must be a number");
    spec.lambda = doc["lambda"].get<double>();
  }
  if (doc.contains("interception_overrides")) {
    spec.interception_overrides = code_map_from_json(doc["interception_overrides"], "interception_overrides");
  }
  if (doc.contains("yield_overrides")) {
    spec.yield_overrides = code_map_from_json(doc["yield_overrides"], "yield_overrides");
  }
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json doc = {{"name", spec.name}};
  json overrides = json::array();
  for (const auto& o : spec.barrier_overrides) {
    overrides.push_back({{"origin", o.origin}, {"dest", o.dest}, {"cost", cost_to_json(o.cost)}});
  }
  doc["barrier_overrides"] = std::move(overrides);
  if (spec.abandon) doc["abandon"] = cost_to_json(*spec.abandon);
  if (spec.lambda) doc["lambda"] = *spec.lambda;
  auto map_json = [](const CodeMap& m) {
    json out = json::object();
    for (const auto& [code, v] : m) out[code.str()] = v;
    return out;
  };
  if (!spec.interception_overrides.empty()) doc["interception_overrides"] = map_json(spec.interception_overrides);
  if (!spec.yield_overrides.empty()) doc["yield_overrides"] = map_json(spec.yield_overrides);
  return doc;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("{}: {}", path.string(), e.what()));
  }
  return scenario_from_json(doc);
}

ModelParams apply_scenario(const ModelParams& params, const ScenarioSpec& spec) {
  ModelParams out = params;
  const std::set<CountryCode> known = params.codes();
  for (const auto& o : spec.barrier_overrides) {
    const auto origins = resolve(o.origin, known);
    const auto dests = resolve(o.dest, known);
    const bool wildcard = o.origin == kWildcard || o.dest == kWildcard;
    for (const auto& i : origins) {
      for (const auto& j : dests) {
        if (wildcard && i == j) continue;
        out.set_barrier(i, j, o.cost);
      }
    }
  }
  for (const auto& [code, value] : spec.interception_overrides) {
    resolve(code.str(), known);
    if (!(value >= 0) || !std::isfinite(value)) {
      throw Error(ErrorKind::InvalidArgument, "interception override for " + code.str() + " must be finite and >= 0");
    }
    out.interception[code] = value;
  }
  for (const auto& [code, value] : spec.yield_overrides) {
    resolve(code.str(), known);
    if (!(value <= 0) || !std::isfinite(value)) {
      throw Error(ErrorKind::InvalidArgument, "yield override for " + code.str() + " must be finite and <= 0");
    }
    out.yield[code] = value;
  }
  if (spec.abandon) out.abandon = *spec.abandon;
  if (spec.lambda) {
    if (!std::isfinite(*spec.lambda) || *spec.lambda < 0) {
      throw Error(ErrorKind::InvalidArgument, "lambda override must be finite and >= 0");
    }
    out.lambda = *spec.lambda;
  }
  return out;
}

ScenarioSpec fortress_spec(const CountryCode& country) {
  return {"fortress-" + country.str(), {{kWildcard, country.str(), kBlocked}}, {}, {}, {}, {}};
}

ScenarioSpec homegrown_spec() {
  return {"homegrown", {{kWildcard, kWildcard, kBlocked}}, {}, {}, {}, {}};
}

ModelParams fortress(const ModelParams& params, const CountryCode& country) {
  return apply_scenario(params, fortress_spec(country));
}

ModelParams homegrown(const ModelParams& params) {
  return apply_scenario(params, homegrown_spec());
}

std::vector<double> sweep_grid(double a_min, double a_max, double step) {
  if (!std::isfinite(a_min) || !std::isfinite(a_max) || !std::isfinite(step) || !(a_min < a_max) ||
      !(step > 0)) {
    throw Error(ErrorKind::InvalidArgument, "sweep grid needs finite a_min < a_max and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((a_max - a_min) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  // Multiply rather than accumulate so points are exact for integral steps.
  for (std::size_t k = 0; k < count; ++k) grid.push_back(a_min + static_cast<double>(k) * step);
  return grid;
}

SweepCurve deterrence_sweep(const ModelParams& params, std::span<const double> abandon_values,
                            double lambda) {
  for (std::size_t k = 0; k < abandon_values.size(); ++k) {
    if (!std::isfinite(abandon_values[k]) || (k > 0 && !(abandon_values[k - 1] < abandon_values[k]))) {
      throw Error(ErrorKind::InvalidArgument, "sweep values must be finite and strictly ascending");
    }
  }
  SweepCurve curve;
  curve.supply_total = params.total_supply();
  curve.targets = params.targets();
  ModelParams point = params;
  point.lambda = lambda;
  for (double a : abandon_values) {
    point.abandon = a;
    const AttackMatrix matrix = solve(point).matrix;
    const TargetTotals totals = target_totals(matrix);
    curve.abandon.push_back(a);
    curve.total.push_back(totals.grand_total);
    std::vector<double> row;
    row.reserve(curve.targets.size());
    for (const auto& t : curve.targets) row.push_back(totals.per_target.at(t));
    curve.per_target.push_back(std::move(row));
  }
  return curve;
}

Threshold find_threshold(std::span<const double> abandon, std::span<const double> total,
                         double fraction) {
  if (abandon.size() != total.size() || abandon.empty()) {
    throw Error(ErrorKind::InvalidArgument, "curve needs matching, non-empty A and total columns");
  }
  if (!(fraction > 0 && fraction < 1)) {
    throw Error(ErrorKind::InvalidArgument, "threshold fraction must lie in (0, 1)");
  }
  const double peak = *std::max_element(total.begin(), total.end());
  const double tolerance = 1e-9 * std::max(1.0, std::abs(peak));
  for (std::size_t k = 1; k < total.size(); ++k) {
    if (total[k] < total[k - 1] - tolerance) {
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("curve decreases between A={} and A={}", abandon[k - 1], abandon[k]));
    }
  }
  if (!(peak > 0)) throw Error(ErrorKind::ThresholdOutOfRange, "curve never rises above zero");
  const double level = fraction * peak;
  for (std::size_t k = 0; k < total.size(); ++k) {
    if (total[k] < level) continue;
    if (k == 0) return {abandon[0], fraction, level};
    const double t = (level - total[k - 1]) / (total[k] - total[k - 1]);
    return {abandon[k - 1] + t * (abandon[k] - abandon[k - 1]), fraction, level};
  }
  throw Error(ErrorKind::ThresholdOutOfRange, "curve never reaches the threshold level");
}

Threshold find_threshold(const SweepCurve& curve, double fraction) {
  return find_threshold(curve.abandon, curve.total, fraction);
}

double DeltaMatrix::at(const CountryCode& source, const CountryCode& target) const {
  const auto si = std::find(sources.begin(), sources.end(), source);
  const auto tj = std::find(targets.begin(), targets.end(), target);
  if (si == sources.end() || tj == targets.end()) return 0.0;
  return delta[si - sources.begin()][tj - targets.begin()];
}

DeltaMatrix diff_matrices(const AttackMatrix& base, const AttackMatrix& alt) {
  if (base.sources != alt.sources || base.targets != alt.targets) {
    throw Error(ErrorKind::IndexMismatch, "attack matrices have different source or target sets");
  }
  DeltaMatrix d;
  d.sources = base.sources;
  d.targets = base.targets;
  d.delta.assign(base.sources.size(), std::vector<double>(base.targets.size(), 0.0));
  for (std::size_t j = 0; j < base.targets.size(); ++j) {
    TargetDelta column{base.targets[j], 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < base.sources.size(); ++i) {
      d.delta[i][j] = alt.plots[i][j] - base.plots[i][j];
      column.base += base.plots[i][j];
      column.alt += alt.plots[i][j];
    }
    column.delta = column.alt - column.base;
    d.per_target.push_back(column);
  }
  d.ranked = d.per_target;
  std::stable_sort(d.ranked.begin(), d.ranked.end(),
                   [](const TargetDelta& a, const TargetDelta& b) { return a.delta > b.delta; });
  return d;
}

std::string format_sweep(const SweepCurve& curve) {
  std::vector<std::string> header{"A", "total_attacks"};
  for (const auto& t : curve.targets) header.push_back(t.str());
  std::string out = csv_line(header);
  for (std::size_t k = 0; k < curve.abandon.size(); ++k) {
    std::vector<std::string> row{format_number(curve.abandon[k]), format_number(curve.total[k])};
    for (double v : curve.per_target[k]) row.push_back(format_number(v));
    out += csv_line(row);
  }
  return out;
}

std::string format_delta(const DeltaMatrix& delta) {
  std::string out = csv_line({"source", "target", "delta"});
  for (std::size_t i = 0; i < delta.sources.size(); ++i) {
    for (std::size_t j = 0; j < delta.targets.size(); ++j) {
      out += csv_line({delta.sources[i].str(), delta.targets[j].str(), format_number(delta.delta[i][j])});
    }
  }
  return out;
}

std::string format_ranked_gainers(const DeltaMatrix& delta) {
  std::string out = csv_line({"rank", "target", "base", "alt", "delta"});
  for (std::size_t k = 0; k < delta.ranked.size(); ++k) {
    const auto& r = delta.ranked[k];
    out += csv_line({std::to_string(k + 1), r.target.str(), format_number(r.base),
                     format_number(r.alt), format_number(r.delta)});
  }
  return out;
}

}  // namespace tnrisk
