#pragma once

#include <tnrisk/evader.hpp>
#include <tnrisk/params.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tnrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

enum class Mode { estimate, pre_estimated };
enum class OutputFormat { csv, json };

/// Bad flag values; always exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path data_dir = "data/bundled";
  Mode mode = Mode::pre_estimated;
  double lambda = kDefaultLambda;
  double abandon = kBlocked;
  std::string weights_preset = "default";  // default | high | low | "r,s,o"
  SupportWeights weights = SupportWeights::standard();
  double plot_factor = kDefaultPlotFactor;
  std::filesystem::path output_dir = "out";
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 1;
  std::size_t mc_samples = 0;  // Monte Carlo cross-check draws per source; 0 disables
};

/// Throws UsageError for an unknown preset or a malformed triple.
SupportWeights parse_weights(const std::string& text);
/// "inf" or a finite number. Throws UsageError.
double parse_abandon(const std::string& text);

/// The parameter echo written into every output's metadata. Feeding it back
/// through config_from_json reproduces the run.
nlohmann::json config_to_json(const RunConfig& config);
/// Fields absent from `doc` keep their value in `base`. Throws UsageError.
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});

/// Area-proportional circles for the attack-matrix figure.
struct PlotCircle {
  CountryCode source;
  CountryCode target;
  double value = 0.0;
  double relative_area = 0.0;  // value / normalization
};

struct PlotData {
  std::vector<PlotCircle> circles;  // zero entries omitted
  double normalization = 0.0;       // largest value
};

PlotData plot_data(const AttackMatrix& matrix);
std::string format_plot_data(const PlotData& plot);

/// Parameters for the configured mode: the pre-estimated tables or a fresh
/// estimate, with lambda and A from the config.
ModelParams load_params(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

// Each command writes into config.output_dir and returns an exit code.
// Library errors propagate; run_cli maps them onto exit codes.
int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_estimate(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_scenario(const RunConfig& config, const std::string& spec, std::ostream& out);
int cmd_sweep(const RunConfig& config, double a_min, double a_max, double step, double fraction,
              std::ostream& out);

/// Full command line including argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tnrisk::cli
