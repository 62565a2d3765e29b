#pragma once

#include <compare>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace tnrisk {

/// Internal sentinel for an untraversable edge or an unavailable option.
/// Published tables write it as "inf" or as a huge finite number (1e+200);
/// both collapse onto +infinity so it never leaks into an exponential.
inline constexpr double kBlocked = std::numeric_limits<double>::infinity();

/// Any parsed cost at or above this magnitude is treated as BLOCKED.
inline constexpr double kBlockedThreshold = 1e100;

constexpr bool is_blocked(double cost) noexcept { return cost >= kBlockedThreshold; }

/// Parses a cost cell: a decimal number, or "inf"/"infinity" (any case, optional
/// leading '+'). Values >= 1e100 map to kBlocked. Returns nullopt for anything
/// else, including NaN and negative infinities.
std::optional<double> parse_cost(std::string_view text);

/// Parses a finite decimal number; nullopt on garbage, NaN or infinity.
std::optional<double> parse_finite(std::string_view text);

/// Shortest decimal text that round-trips to the same double; BLOCKED
/// prints as "inf".
std::string format_number(double value);

/// ISO-3166 alpha-3 style country code: exactly three ASCII upper-case letters.
class CountryCode {
 public:
  CountryCode() = default;
  /// Throws Error(InvalidArgument) when `code` is not three upper-case letters.
  explicit CountryCode(std::string code);

  static bool is_valid(std::string_view code) noexcept;

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const CountryCode&, const CountryCode&) = default;
  friend bool operator==(const CountryCode&, const CountryCode&) = default;

 private:
  std::string value_;
};

using CodePair = std::pair<CountryCode, CountryCode>;

}  // namespace tnrisk
