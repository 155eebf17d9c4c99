#pragma once

#include <stdexcept>
#include <string>

namespace oqr {

/// Invalid input shape, parameter or configuration value.
struct ConfigError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Raised when an iterate leaves the finite range (or the least-squares
/// norm guard). Usually means the stepsize schedule is misconfigured, but for
/// least squares under heavy tails it is an expected experimental outcome.
struct NumericalDivergence : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

} // namespace oqr
