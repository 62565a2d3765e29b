#pragma once

#include "tnrisk/evader.hpp"
#include "tnrisk/params.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tnrisk {

inline constexpr const char* kWildcard = "*";

/// Origin and destination are a country code or "*". The wildcard never
/// matches the diagonal; a domestic cost changes only through an explicit
/// (X, X) override.
struct BarrierOverride {
  std::string origin;
  std::string dest;
  double cost = kBlocked;

  friend bool operator==(const BarrierOverride&, const BarrierOverride&) = default;
};

struct ScenarioSpec {
  std::string name;
  std::vector<BarrierOverride> barrier_overrides;  // applied in order, later wins
  std::optional<double> abandon;
  std::optional<double> lambda;
  CodeMap interception_overrides;
  CodeMap yield_overrides;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Costs may be numbers or the string "inf". Throws InvalidArgument on schema
/// errors.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Throws MissingFile / Io, or InvalidArgument for unparsable JSON.
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Throws UnknownCode for a pattern or override key that is not a known code.
ModelParams apply_scenario(const ModelParams& params, const ScenarioSpec& spec);

ScenarioSpec fortress_spec(const CountryCode& country);
ScenarioSpec homegrown_spec();

/// T[i][country] = BLOCKED for every i != country. Throws UnknownCode.
ModelParams fortress(const ModelParams& params, const CountryCode& country);
/// Every off-diagonal T BLOCKED.
ModelParams homegrown(const ModelParams& params);

/// a_min, a_min + step, ... up to a_max inclusive (within 1e-9 of a step).
/// Throws InvalidArgument unless a_min < a_max, step > 0 and all are finite.
std::vector<double> sweep_grid(double a_min, double a_max, double step);

inline constexpr double kDefaultSweepMin = -60.0;
inline constexpr double kDefaultSweepMax = 10.0;
inline constexpr double kDefaultSweepStep = 1.0;
inline constexpr double kDefaultThresholdFraction = 0.5;

struct SweepCurve {
  std::vector<double> abandon;                   // A values
  std::vector<double> total;                     // grand total attacks per A
  std::vector<CountryCode> targets;
  std::vector<std::vector<double>> per_target;   // [point][target]
  double supply_total = 0.0;
};

/// Re-solves the model for each A. Throws InvalidArgument unless the values
/// are finite and ascending.
SweepCurve deterrence_sweep(const ModelParams& params, std::span<const double> abandon_values,
                            double lambda);

struct Threshold {
  double abandon = 0.0;   // A*
  double fraction = kDefaultThresholdFraction;
  double level = 0.0;     // fraction * max total
};

/// Smallest A where the curve reaches fraction * max, linearly interpolated
/// between grid points. Throws InvalidArgument for a non-monotone curve or a
/// fraction outside (0, 1), and ThresholdOutOfRange when the level is never
/// reached (an all-zero curve).
Threshold find_threshold(std::span<const double> abandon, std::span<const double> total,
                         double fraction = kDefaultThresholdFraction);
Threshold find_threshold(const SweepCurve& curve, double fraction = kDefaultThresholdFraction);

struct TargetDelta {
  CountryCode target;
  double base = 0.0;
  double alt = 0.0;
  double delta = 0.0;
};

struct DeltaMatrix {
  std::vector<CountryCode> sources;
  std::vector<CountryCode> targets;
  std::vector<std::vector<double>> delta;   // alt - base, [source][target]
  std::vector<TargetDelta> per_target;      // aligned with targets
  std::vector<TargetDelta> ranked;          // by delta, largest gain first

  double at(const CountryCode& source, const CountryCode& target) const;
};

/// Throws IndexMismatch unless both matrices share source and target sets.
DeltaMatrix diff_matrices(const AttackMatrix& base, const AttackMatrix& alt);

/// A,total_attacks followed by one column per target.
std::string format_sweep(const SweepCurve& curve);
/// source,target,delta
std::string format_delta(const DeltaMatrix& delta);
/// rank,target,base,alt,delta
std::string format_ranked_gainers(const DeltaMatrix& delta);

}  // namespace tnrisk
