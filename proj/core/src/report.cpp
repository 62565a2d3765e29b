#include "tnrisk/report.hpp"

#include "tnrisk/csv.hpp"

namespace tnrisk {

std::string format_attack_matrix(const AttackMatrix& matrix) {
  std::string out = csv_line({"source", "target", "expected_plots"});
  for (std::size_t i = 0; i < matrix.sources.size(); ++i) {
    for (std::size_t j = 0; j < matrix.targets.size(); ++j) {
      out += csv_line({matrix.sources[i].str(), matrix.targets[j].str(),
                       format_number(matrix.plots[i][j])});
    }
  }
  return out;
}

std::string format_abandoned(const AttackMatrix& matrix) {
  std::string out = csv_line({"source", "abandoned"});
  for (std::size_t i = 0; i < matrix.sources.size(); ++i) {
    out += csv_line({matrix.sources[i].str(), format_number(matrix.abandoned[i])});
  }
  return out;
}

std::string format_target_totals(const TargetTotals& totals) {
  std::string out = csv_line({"target", "expected_plots"});
  for (const auto& [code, value] : totals.per_target) {
    out += csv_line({code.str(), format_number(value)});
  }
  return out;
}

nlohmann::json json_number(double value) {
  if (is_blocked(value)) return "inf";
  return value;
}

nlohmann::json attack_matrix_json(const AttackMatrix& matrix, const nlohmann::json& params_echo) {
  using nlohmann::json;
  json cells = json::array();
  json abandoned = json::object();
  json source_totals = json::object();
  for (std::size_t i = 0; i < matrix.sources.size(); ++i) {
    double attacks = 0.0;
    for (std::size_t j = 0; j < matrix.targets.size(); ++j) {
      cells.push_back({{"source", matrix.sources[i].str()},
                       {"target", matrix.targets[j].str()},
                       {"expected_plots", matrix.plots[i][j]}});
      attacks += matrix.plots[i][j];
    }
    abandoned[matrix.sources[i].str()] = matrix.abandoned[i];
    source_totals[matrix.sources[i].str()] = {
        {"supply", matrix.supply[i]}, {"attacks", attacks}, {"abandoned", matrix.abandoned[i]}};
  }
  const TargetTotals totals = target_totals(matrix);
  json per_target = json::object();
  for (const auto& [code, value] : totals.per_target) per_target[code.str()] = value;
  json dead = json::array();
  for (const auto& code : matrix.dead_sources) dead.push_back(code.str());

  return {{"params", params_echo},
          {"matrix", std::move(cells)},
          {"abandoned", std::move(abandoned)},
          {"source_totals", std::move(source_totals)},
          {"target_totals", std::move(per_target)},
          {"grand_total", totals.grand_total},
          {"total_plots", matrix.total_plots},
          {"dead_sources", std::move(dead)}};
}

}  // namespace tnrisk
