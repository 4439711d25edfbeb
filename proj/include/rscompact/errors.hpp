#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rscompact {

enum class ErrorKind {
  InvalidArgument,
  NotUnitary,
  NotSpecialUnitary,
  NoConvergence,
  AlcoveMismatch,
  SingularConfiguration,
  NonPositiveFactor,
  DenominatorSingular,
  NegativeRadicand,
  OutsideDomain,
  NonRegular,
  NonPositiveRatio,
  MismatchedBase,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotSpecialUnitary: return "NotSpecialUnitary";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AlcoveMismatch: return "AlcoveMismatch";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorKind::DenominatorSingular: return "DenominatorSingular";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::NonRegular: return "NonRegular";
    case ErrorKind::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorKind::MismatchedBase: return "MismatchedBase";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `kind()` tells
/// callers which precondition or numerical guard tripped.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rscompact
