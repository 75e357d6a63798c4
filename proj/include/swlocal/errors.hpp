#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swlocal {

enum class Errc {
  NegativeProbability,
  NotNormalized,
  ZeroMarginal,
  BadShape,
  SourceIsConfusable,
  RatesOutsideRegion,
  DegenerateLevel,
  OverflowingLevel,
  LevelOutOfRange,
  LengthMismatch,
  IndexOutOfRange,
  InstanceTooLarge,
  RateNotBelowEntropy,
  InvalidConfig,
  BadContainer,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// CLI exit status for an error: 2 validation, 3 infeasible instance, 4 I/O.
int exit_code(Errc code) noexcept;

}  // namespace swlocal
