#pragma once

#include <stdexcept>
#include <string>

namespace wkstab {

enum class ErrorKind {
  Parse,
  InvalidInput,
  Unbounded,
  NotFullDimensional,
  NotDelzant,
  RedundantFacet,
  DegenerateSimplex,
  SingularOnDomain,
  MaxDepthExceeded,
  NotPositive,
  DomainViolation,
  NotCanonicalFano,
  IllConditioned,
  OriginNotInterior,
  InfeasibleStart,
  MaxIterations,
  NotAdmissible,
  NotPositiveDefinite,
  TooCloseToBoundary,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::NotFullDimensional: return "NotFullDimensional";
    case ErrorKind::NotDelzant: return "NotDelzant";
    case ErrorKind::RedundantFacet: return "RedundantFacet";
    case ErrorKind::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorKind::SingularOnDomain: return "SingularOnDomain";
    case ErrorKind::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NotCanonicalFano: return "NotCanonicalFano";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::OriginNotInterior: return "OriginNotInterior";
    case ErrorKind::InfeasibleStart: return "InfeasibleStart";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::TooCloseToBoundary: return "TooCloseToBoundary";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The kind is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical failures (as opposed to invalid input).
inline bool is_solver_failure(ErrorKind kind) {
  return kind == ErrorKind::MaxIterations || kind == ErrorKind::MaxDepthExceeded ||
         kind == ErrorKind::IllConditioned || kind == ErrorKind::NotPositiveDefinite;
}

}  // namespace wkstab
