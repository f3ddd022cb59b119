#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amw {

enum class ErrorCode {
  NonDoublyStochastic,
  BadEpsilon,
  BadTraffic,
  DimensionMismatch,
  InvalidState,
  ReconfigWhileReconfiguring,
  TooLarge,
  BadFrame,
  NoConvergence,
  ConfigInvalid,
  InsufficientBatches,
  TooFewIntervals,
  NegativeArgument,
  NonPositiveData,
  NotApplicable,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace amw
