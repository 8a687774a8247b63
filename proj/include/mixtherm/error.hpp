#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixtherm {

enum class ErrorKind {
  EmptyMixture,
  NonPositiveDensity,
  NonPositiveTemperature,
  InvalidSpecies,
  IndexOutOfRange,
  InvalidPotential,
  OutOfTableRange,
  DomainError,
  QuadratureFailure,
  BoseSaturation,
  ConvergenceFailure,
  TooLarge,
  NonPositiveTau,
  MissingCorrelation,
  AnchorNotClassical,
  StiffIntegration,
  PoleHit,
  SingularSystem,
  UnsupportedOrder,
  GridMismatch,
  ConfigError,
  ExperimentalRefused,
};

std::string_view to_string(ErrorKind kind);

/// Numeric or contract failure. `kind` is the stable machine-readable tag;
/// `path` carries a JSON-pointer for config errors and a species label or
/// command context otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

}  // namespace mixtherm
