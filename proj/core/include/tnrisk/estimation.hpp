#pragma once

#include "tnrisk/dataset.hpp"
#include "tnrisk/params.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tnrisk {

enum class NormalizeMode {
  cost,   // (v - min) / (median - min): min -> 0, median -> 1
  yield,  // (min - v) / (median - min): min -> 0, median -> -1
};

/// Median; mean of the two central values for even lengths. Throws
/// InvalidArgument on an empty input.
double median(std::vector<double> values);

/// Min-median normalization shared by every estimator. BLOCKED entries are
/// excluded from the statistics and passed through unchanged.
/// Throws InvalidArgument when fewer than two finite values are given and
/// DegenerateSpread when median == min.
std::vector<double> normalize_min_median(std::span<const double> values, NormalizeMode mode);

/// Fills missing survey fractions with the unweighted mean of the surveyed
/// countries in the same region. Countries without a Muslim population are
/// not sources and are left alone. Throws EmptyRegion.
std::vector<CountryRecord> impute_survey(std::vector<CountryRecord> countries);

/// S_i = Q * J_i * (s_r*sigma_r + s_s*sigma_s + s_o*sigma_o) for every country
/// with a Muslim population. Throws MissingImputation when such a country has
/// no survey data.
CodeMap estimate_supply(std::span<const CountryRecord> countries, const SupportWeights& weights,
                        double plot_factor);

/// Gravity-law shortfall (p_i p_j / d^2) / m. BLOCKED when m is 0 or missing.
double raw_barrier(double pop_i, double pop_j, double distance_km, std::optional<double> migrants);

struct BarrierEstimate {
  BarrierMatrix costs;
  std::vector<std::string> warnings;
};

/// Normalized barriers for every migration pair; T_ii = 0 for every country.
/// Pairs without migration data stay absent (BLOCKED).
BarrierEstimate estimate_barriers(const DataBundle& bundle);

/// Normalized interception cost over target countries with security data.
CodeMap estimate_interception(std::span<const CountryRecord> countries);

/// Normalized (non-positive) yield over target countries with GDP data.
CodeMap estimate_yield(std::span<const CountryRecord> countries);

struct SensitivityRow {
  CountryCode code;
  double baseline = 0.0;                // supply under the standard weights
  std::vector<double> percent_change;   // one per preset, in input order
};

/// Supply under each preset relative to the standard weights, as
/// 100 * (S_alt / S_standard - 1). Rows sorted by baseline, largest first;
/// countries with zero baseline supply are skipped. Throws InvalidArgument
/// when the standard preset is not in `presets`.
std::vector<SensitivityRow> supply_sensitivity(std::span<const CountryRecord> countries,
                                               std::span<const SupportWeights> presets,
                                               double plot_factor);

struct EstimationOptions {
  SupportWeights weights = SupportWeights::standard();
  double plot_factor = kDefaultPlotFactor;
  double lambda = kDefaultLambda;
  double abandon = kBlocked;
};

struct Estimate {
  ModelParams params;
  std::vector<std::string> warnings;
};

/// Full pipeline: impute, then the four estimators.
Estimate estimate_params(const DataBundle& bundle, const EstimationOptions& options = {});

}  // namespace tnrisk
