#pragma once

#include "tnrisk/types.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tnrisk {

inline constexpr double kDefaultLambda = 0.1;
inline constexpr double kDefaultPlotFactor = 0.002;

/// Weights applied to the "rarely", "sometimes" and "often justified" survey
/// fractions when turning attitudes into plot supply.
struct SupportWeights {
  double rarely = 0.25;
  double sometimes = 0.50;
  double often = 1.00;

  static SupportWeights standard() { return {0.25, 0.50, 1.00}; }
  /// Support concentrated in the committed minority.
  static SupportWeights high_commitment() { return {0.10, 0.20, 1.00}; }
  /// Even weak supporters contribute materially.
  static SupportWeights low_commitment() { return {0.33, 0.66, 1.00}; }

  /// Throws Error(InvalidArgument) unless 0 < rarely <= sometimes <= often <= 1.
  void validate() const;

  friend bool operator==(const SupportWeights&, const SupportWeights&) = default;
};

using CodeMap = std::map<CountryCode, double>;
using BarrierMatrix = std::map<CodePair, double>;

/// The four estimated parameter sets plus the scalar knobs of the model.
/// Barrier pairs absent from `barriers` are BLOCKED.
struct ModelParams {
  CodeMap supply;         // S_i, expected plots originating in i
  BarrierMatrix barriers; // T_ij, translocation cost
  CodeMap interception;   // I_j
  CodeMap yield;          // Y_j, <= 0
  double abandon = kBlocked;
  double lambda = kDefaultLambda;
  double plot_factor = kDefaultPlotFactor;

  double barrier(const CountryCode& origin, const CountryCode& dest) const;
  void set_barrier(const CountryCode& origin, const CountryCode& dest, double cost);

  /// Codes with S_i > 0, sorted.
  std::vector<CountryCode> sources() const;
  /// Codes with both I_j and Y_j defined, sorted.
  std::vector<CountryCode> targets() const;
  /// Every code mentioned anywhere in the parameters.
  std::set<CountryCode> codes() const;

  /// Sets T_ii = 0 for every known code.
  void force_domestic_zero();

  double total_supply() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

}  // namespace tnrisk
