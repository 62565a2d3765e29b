#include "tnrisk/estimation.hpp"

#include "tnrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace tnrisk {

namespace {

double weighted_support(const SurveyFractions& s, const SupportWeights& w) {
  return w.rarely * s.rarely + w.sometimes * s.sometimes + w.often * s.often;
}

bool is_source(const CountryRecord& c) { return c.muslim_pop.has_value(); }

/// Normalizes a code -> raw value map in place of a parallel vector.
template <class Key>
std::map<Key, double> normalize_map(const std::map<Key, double>& raw, NormalizeMode mode) {
  std::vector<double> values;
  values.reserve(raw.size());
  for (const auto& [_, v] : raw) values.push_back(v);
  const auto normalized = normalize_min_median(values, mode);
  std::map<Key, double> out;
  std::size_t i = 0;
  for (const auto& [key, _] : raw) out.emplace(key, normalized[i++]);
  return out;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "median of an empty list");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

std::vector<double> normalize_min_median(std::span<const double> values, NormalizeMode mode) {
  std::vector<double> finite;
  for (double v : values) {
    if (!is_blocked(v)) finite.push_back(v);
  }
  if (finite.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "normalization needs at least two finite values");
  }
  const double lo = *std::min_element(finite.begin(), finite.end());
  const double spread = median(finite) - lo;
  if (!(spread > 0.0)) {
    throw Error(ErrorKind::DegenerateSpread,
                fmt::format("median equals minimum ({}); cannot normalize", lo));
  }

  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (is_blocked(v)) {
      out.push_back(v);
    } else if (mode == NormalizeMode::cost) {
      out.push_back((v - lo) / spread);
    } else {
      out.push_back((lo - v) / spread);
    }
  }
  return out;
}

std::vector<CountryRecord> impute_survey(std::vector<CountryRecord> countries) {
  struct Accumulator {
    SurveyFractions sum;
    std::size_t count = 0;
  };
  std::map<std::string, Accumulator> regions;
  for (const auto& c : countries) {
    if (!c.survey) continue;
    auto& acc = regions[c.region];
    acc.sum.never += c.survey->never;
    acc.sum.rarely += c.survey->rarely;
    acc.sum.sometimes += c.survey->sometimes;
    acc.sum.often += c.survey->often;
    ++acc.count;
  }

  for (auto& c : countries) {
    if (c.survey || !is_source(c)) continue;
    const auto it = regions.find(c.region);
    if (it == regions.end()) {
      throw Error(ErrorKind::EmptyRegion,
                  fmt::format("region '{}' has no surveyed country to impute {} from", c.region,
                              c.code.str()));
    }
    const auto n = static_cast<double>(it->second.count);
    const auto& s = it->second.sum;
    c.survey = SurveyFractions{s.never / n, s.rarely / n, s.sometimes / n, s.often / n};
  }
  return countries;
}

CodeMap estimate_supply(std::span<const CountryRecord> countries, const SupportWeights& weights,
                        double plot_factor) {
  weights.validate();
  if (!(plot_factor > 0.0) || !std::isfinite(plot_factor)) {
    throw Error(ErrorKind::InvalidArgument, "plot factor Q must be positive");
  }
  CodeMap out;
  for (const auto& c : countries) {
    if (!is_source(c)) continue;
    if (*c.muslim_pop == 0.0) {
      out[c.code] = 0.0;
      continue;
    }
    if (!c.survey) {
      throw Error(ErrorKind::MissingImputation,
                  c.code.str() + " has no survey data; run impute_survey first");
    }
    out[c.code] = plot_factor * *c.muslim_pop * weighted_support(*c.survey, weights);
  }
  return out;
}

double raw_barrier(double pop_i, double pop_j, double distance_km, std::optional<double> migrants) {
  if (!(pop_i > 0.0) || !(pop_j > 0.0) || !(distance_km > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "raw_barrier needs positive populations and distance");
  }
  if (!migrants || *migrants == 0.0) return kBlocked;
  if (*migrants < 0.0) throw Error(ErrorKind::NegativeValue, "negative migrant count");
  return (pop_i * pop_j / (distance_km * distance_km)) / *migrants;
}

BarrierEstimate estimate_barriers(const DataBundle& bundle) {
  BarrierEstimate result;
  BarrierMatrix raw;
  for (const auto& [pair, migrants] : bundle.migration.entries()) {
    const auto& [origin, dest] = pair;
    if (origin == dest) continue;
    const auto* from = bundle.find(origin);
    const auto* to = bundle.find(dest);
    if (!from || !to) {
      throw Error(ErrorKind::UnknownCode,
                  fmt::format("migration pair {}->{} names an unknown country", origin.str(), dest.str()));
    }
    const auto distance = bundle.distances.find(origin, dest);
    if (!distance) {
      throw Error(ErrorKind::MissingData,
                  fmt::format("no distance for migration pair {}->{}", origin.str(), dest.str()));
    }
    const double value = raw_barrier(from->population, to->population, *distance, migrants);
    if (!is_blocked(value)) raw.emplace(pair, value);
  }

  result.costs = normalize_map(raw, NormalizeMode::cost);
  for (const auto& c : bundle.countries) result.costs[{c.code, c.code}] = 0.0;

  for (const auto& c : bundle.countries) {
    if (!c.muslim_pop || *c.muslim_pop <= 0.0) continue;
    const auto first = result.costs.lower_bound({c.code, CountryCode{}});
    bool any_foreign = false;
    for (auto it = first; it != result.costs.end() && it->first.first == c.code; ++it) {
      if (it->first.second != c.code) any_foreign = true;
    }
    if (!any_foreign) {
      result.warnings.push_back(fmt::format(
          "{}: no recorded migration to any destination; all foreign barriers are BLOCKED",
          c.code.str()));
    }
  }
  return result;
}

CodeMap estimate_interception(std::span<const CountryRecord> countries) {
  CodeMap raw;
  for (const auto& c : countries) {
    if (c.is_target && c.sec_fraction) raw.emplace(c.code, *c.sec_fraction);
  }
  if (raw.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "interception needs at least two targets with security data");
  }
  return normalize_map(raw, NormalizeMode::cost);
}

CodeMap estimate_yield(std::span<const CountryRecord> countries) {
  CodeMap raw;
  for (const auto& c : countries) {
    if (c.is_target && c.gdp_usd) raw.emplace(c.code, *c.gdp_usd);
  }
  if (raw.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "yield needs at least two targets with GDP");
  }
  return normalize_map(raw, NormalizeMode::yield);
}

std::vector<SensitivityRow> supply_sensitivity(std::span<const CountryRecord> countries,
                                               std::span<const SupportWeights> presets,
                                               double plot_factor) {
  const auto standard = SupportWeights::standard();
  if (std::find(presets.begin(), presets.end(), standard) == presets.end()) {
    throw Error(ErrorKind::InvalidArgument, "sensitivity presets must include the standard weights");
  }
  const auto baseline = estimate_supply(countries, standard, plot_factor);
  std::vector<CodeMap> alternatives;
  for (const auto& w : presets) alternatives.push_back(estimate_supply(countries, w, plot_factor));

  std::vector<SensitivityRow> rows;
  for (const auto& [code, base] : baseline) {
    if (!(base > 0.0)) continue;
    SensitivityRow row{code, base, {}};
    for (const auto& alt : alternatives) row.percent_change.push_back(100.0 * (alt.at(code) / base - 1.0));
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.baseline > b.baseline; });
  return rows;
}

Estimate estimate_params(const DataBundle& bundle, const EstimationOptions& options) {
  Estimate out;
  const auto countries = impute_survey(bundle.countries);
  out.params.supply = estimate_supply(countries, options.weights, options.plot_factor);

  DataBundle imputed = bundle;
  imputed.countries = countries;
  auto barriers = estimate_barriers(imputed);
  out.params.barriers = std::move(barriers.costs);
  out.warnings = std::move(barriers.warnings);

  out.params.interception = estimate_interception(countries);
  out.params.yield = estimate_yield(countries);
  out.params.abandon = options.abandon;
  out.params.lambda = options.lambda;
  out.params.plot_factor = options.plot_factor;
  out.params.force_domestic_zero();
  return out;
}

}  // namespace tnrisk
