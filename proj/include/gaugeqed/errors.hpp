#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gaugeqed {

enum class ErrorKind {
  InvalidDimension,
  Validation,
  Convergence,
  SingularDenominator,
  Unsupported,
  Cutoff,
  Config,
  Io
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::SingularDenominator: return "singular-denominator";
    case ErrorKind::Unsupported: return "unsupported-instantiation";
    case ErrorKind::Cutoff: return "cutoff";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// carries the values seen while iterating, last entry is the most recent
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> trace)
      : Error(ErrorKind::Convergence, msg), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace gaugeqed
