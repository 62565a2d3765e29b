#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tnrisk {

enum class ErrorKind {
  Io,
  MissingFile,
  MalformedRow,
  DuplicateCode,
  AsymmetricDistance,
  NegativeValue,
  CodeMismatch,
  MissingData,
  DegenerateSpread,
  MissingImputation,
  EmptyRegion,
  InvalidArgument,
  EmptyTargets,
  NegativeCycle,
  NotAPath,
  BlockedEdgeOnPath,
  SupplyMismatch,
  DeadSource,
  UnknownCode,
  ThresholdOutOfRange,
  IndexMismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` is the stable part of the
/// contract; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  /// 1-based input line for parse errors, 0 otherwise.
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
};

/// True for failures caused by the environment (missing or unreadable files)
/// rather than by the data or the model.
bool is_io_error(ErrorKind kind) noexcept;

}  // namespace tnrisk
