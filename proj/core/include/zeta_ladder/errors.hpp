#pragma once

#include <stdexcept>
#include <string>

namespace zeta_ladder {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Root bracketing failed: no sign change over the given interval.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iteration budget exhausted; carries the best value found and its error estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_value, double error_estimate)
      : std::runtime_error(what), best_value(best_value), error_estimate(error_estimate) {}
  double best_value;
  double error_estimate;
};

// Requested accuracy is unattainable with the current configuration.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CacheError : public std::runtime_error {
 public:
  enum class Kind { io, version_mismatch, corrupt, fingerprint_mismatch };
  CacheError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  Kind kind;
};

}  // namespace zeta_ladder
