#pragma once

#include <stdexcept>
#include <string>

namespace fgbc {

enum class ErrorKind {
  Structural,       // incompatible operands (rank or dimension mismatch)
  Validation,       // malformed input (non-skew matrix, bad config value)
  Domain,           // evaluation outside the domain of definition
  InvalidMetric,    // Minkowski axioms violated
  Numerical,        // iteration failed to converge, step underflow
  Topology,         // degree bookkeeping inconsistent with the manifold
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Structural: return "structural error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InvalidMetric: return "invalid metric";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Topology: return "topology error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace fgbc
