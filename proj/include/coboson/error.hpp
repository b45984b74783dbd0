#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coboson {

enum class ErrorKind {
  EmptyInput,
  NegativeCoefficient,
  NotNormalized,
  InvalidArgument,
  InfeasiblePurity,
  MinusBranchInfeasible,
  Infeasible,
  InsufficientPowerSums,
  TooLarge,
  VanishingDenominator,
  PurityMismatch,
  InfeasibleN,
  ChainViolation,
};

std::string_view to_string(ErrorKind kind);

// True for errors caused by malformed user input rather than by the numerics.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace coboson
