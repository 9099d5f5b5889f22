#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cec {

enum class ErrorKind {
  InvalidMatrix,
  DimensionMismatch,
  EmptyCluster,
  DegenerateCluster,
  InvalidSpectrum,
  EmptyInput,
  ConstantImage,
  ConfigError,
  IoError,
  UnsupportedDimensionForSvg,
};

/// Stable identifier used in `error:<kind>:` diagnostics.
std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cec
