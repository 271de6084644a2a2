#pragma once

#include <stdexcept>
#include <string>

namespace impact {

// Invalid argument or out-of-domain input (bad grids, x outside [0, T], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed serialized input (JSON specs, counts files).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A crossing-type measure was requested for a model with a jump.
class ContinuityRequiredError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested parameter lies below the admissibility threshold of the
// measure; theta0() reports the smallest admissible parameter when that
// threshold is a single number (NaN otherwise).
class NotAdmissibleError : public std::runtime_error {
 public:
  NotAdmissibleError(const std::string& what, double theta0)
      : std::runtime_error(what), theta0_(theta0) {}
  double theta0() const { return theta0_; }

 private:
  double theta0_;
};

}  // namespace impact
