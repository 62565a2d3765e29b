#pragma once

#include "tnrisk/evader.hpp"

#include <string>

#include <nlohmann/json.hpp>

namespace tnrisk {

/// source,target,expected_plots; one row per pair, zeros included.
std::string format_attack_matrix(const AttackMatrix& matrix);
/// source,abandoned
std::string format_abandoned(const AttackMatrix& matrix);
/// target,expected_plots
std::string format_target_totals(const TargetTotals& totals);

/// JSON numbers cannot hold infinity, so BLOCKED values are written as "inf".
nlohmann::json json_number(double value);

/// Matrix, abandon column, marginals and the caller's parameter echo.
nlohmann::json attack_matrix_json(const AttackMatrix& matrix, const nlohmann::json& params_echo);

}  // namespace tnrisk
