#pragma once

#include <stdexcept>
#include <string>

namespace ncl {

// Bad user input: malformed config, out-of-range parameter, or a time step
// that violates the explicit-term stability guard.  Maps to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StabilityGuardError : ConfigError {
  explicit StabilityGuardError(const std::string& msg) : ConfigError(msg) {}
};

// Numerical aborts during a run.  Map to exit code 2.
struct GuardViolation : std::runtime_error {
  explicit GuardViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct EllipticityLoss : std::runtime_error {
  explicit EllipticityLoss(const std::string& msg) : std::runtime_error(msg) {}
};

struct BlowUp : std::runtime_error {
  BlowUp(const std::string& msg, double t_abort)
      : std::runtime_error(msg), t(t_abort) {}
  double t;
};

}  // namespace ncl
