#pragma once

#include "tnrisk/params.hpp"
#include "tnrisk/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tnrisk {

/// Survey answers to "are attacks on civilians justified": never, rarely,
/// sometimes, often. Fractions of respondents; non-respondents make the sum < 1.
struct SurveyFractions {
  double never = 0.0;
  double rarely = 0.0;
  double sometimes = 0.0;
  double often = 0.0;

  double total() const { return never + rarely + sometimes + often; }
  friend bool operator==(const SurveyFractions&, const SurveyFractions&) = default;
};

struct CountryRecord {
  CountryCode code;
  std::string name;
  std::string region;
  double population = 0.0;
  std::optional<double> gdp_usd;
  std::optional<double> sec_fraction;  // public order and safety spend / GDP
  std::optional<double> muslim_pop;    // missing: country is not a plot source
  std::optional<SurveyFractions> survey;
  bool is_oecd = false;
  bool is_target = false;

  friend bool operator==(const CountryRecord&, const CountryRecord&) = default;
};

enum class PairKind { migration, distance };

/// Long-format (origin, dest) -> value table. For migration a missing pair
/// means "no data", which is not the same as a recorded zero.
class PairTable {
 public:
  explicit PairTable(PairKind kind = PairKind::migration) : kind_(kind) {}

  PairKind kind() const noexcept { return kind_; }
  std::optional<double> find(const CountryCode& origin, const CountryCode& dest) const;
  void insert(const CountryCode& origin, const CountryCode& dest, double value);
  const std::map<CodePair, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const PairTable&, const PairTable&) = default;

 private:
  PairKind kind_;
  std::map<CodePair, double> entries_;
};

struct DataBundle {
  std::vector<CountryRecord> countries;
  PairTable migration{PairKind::migration};
  PairTable distances{PairKind::distance};
  std::optional<ModelParams> pre_estimated;

  const CountryRecord* find(const CountryCode& code) const;
};

// File names inside a data directory.
inline constexpr const char* kCountriesFile = "countries.csv";
inline constexpr const char* kMigrationFile = "migration.csv";
inline constexpr const char* kDistanceFile = "distance_km.csv";
inline constexpr const char* kSupplyFile = "supply.csv";
inline constexpr const char* kBarriersFile = "barriers.csv";
inline constexpr const char* kInterceptionFile = "interception.csv";
inline constexpr const char* kYieldFile = "yield.csv";

/// Throws MalformedRow (bad cell, bad header, survey sum > 1) or DuplicateCode.
std::vector<CountryRecord> load_country_table(const std::filesystem::path& path);

/// Distance tables are mirrored when only one direction is given.
/// Throws AsymmetricDistance, NegativeValue, MalformedRow.
PairTable load_pair_table(const std::filesystem::path& path, PairKind kind);

/// Reads supply.csv, barriers.csv, interception.csv and yield.csv. T_ii is
/// forced to 0; pairs absent from barriers.csv are BLOCKED.
/// Throws MissingFile, CodeMismatch (a yield row without an interception row),
/// DuplicateCode, NegativeValue, MalformedRow.
ModelParams load_pre_estimated(const std::filesystem::path& dir);

bool has_pre_estimated(const std::filesystem::path& dir);

/// countries.csv is required; the pair tables and the pre-estimated set are
/// loaded when present.
DataBundle load_bundle(const std::filesystem::path& dir);

enum class IssueKind {
  DuplicateCode,
  UnknownCode,
  MissingSecurityData,
  InvalidPopulation,
  InvalidSurvey,
  NegativeValue,
  AsymmetricDistance,
  NonzeroSelfDistance,
  MissingDistance,
};

std::string_view to_string(IssueKind kind) noexcept;

struct ValidationIssue {
  IssueKind kind;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool empty() const noexcept { return issues.empty(); }
};

/// Collects every invariant violation; never throws on bad data.
ValidationReport validate_bundle(const DataBundle& bundle);

std::string format_country_table(std::span<const CountryRecord> countries);
std::string format_pair_table(const PairTable& table);
std::string format_supply(const CodeMap& supply);
std::string format_interception(const CodeMap& interception);
std::string format_yield(const CodeMap& yield);
std::string format_barriers(const BarrierMatrix& barriers);
std::string format_validation_report(const ValidationReport& report);

/// Writes the four pre-estimated CSVs into `dir`.
void write_pre_estimated(const std::filesystem::path& dir, const ModelParams& params);

}  // namespace tnrisk
