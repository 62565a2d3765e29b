#include "tnrisk/types.hpp"

#include "tnrisk/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace tnrisk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    // from_chars reports out-of-range for 1e400 and friends
    if (ec == std::errc::result_out_of_range && ptr == s.data() + s.size()) {
      return s.front() == '-' ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
    }
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::optional<double> parse_cost(std::string_view text) {
  auto s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (iequals(s, "inf") || iequals(s, "infinity")) return kBlocked;
  const auto value = parse_double(s);
  if (!value || std::isnan(*value) || *value <= -kBlockedThreshold) return std::nullopt;
  if (is_blocked(*value)) return kBlocked;
  return value;
}

std::optional<double> parse_finite(std::string_view text) {
  const auto value = parse_double(text);
  if (!value || !std::isfinite(*value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  if (is_blocked(value)) return "inf";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{}", value);
}

CountryCode::CountryCode(std::string code) : value_(std::move(code)) {
  if (!is_valid(value_)) {
    throw Error(ErrorKind::InvalidArgument, "invalid country code '" + value_ + "'");
  }
}

bool CountryCode::is_valid(std::string_view code) noexcept {
  return code.size() == 3 && std::all_of(code.begin(), code.end(), [](char c) {
           return c >= 'A' && c <= 'Z';
         });
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateCode: return "DuplicateCode";
    case ErrorKind::AsymmetricDistance: return "AsymmetricDistance";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::CodeMismatch: return "CodeMismatch";
    case ErrorKind::MissingData: return "MissingData";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::MissingImputation: return "MissingImputation";
    case ErrorKind::EmptyRegion: return "EmptyRegion";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyTargets: return "EmptyTargets";
    case ErrorKind::NegativeCycle: return "NegativeCycle";
    case ErrorKind::NotAPath: return "NotAPath";
    case ErrorKind::BlockedEdgeOnPath: return "BlockedEdgeOnPath";
    case ErrorKind::SupplyMismatch: return "SupplyMismatch";
    case ErrorKind::DeadSource: return "DeadSource";
    case ErrorKind::UnknownCode: return "UnknownCode";
    case ErrorKind::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::size_t line)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), line_(line) {}

bool is_io_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::Io || kind == ErrorKind::MissingFile;
}

}  // namespace tnrisk
