#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lipdiff {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point sits outside (or on the boundary of) a map's open domain.
struct DomainViolation : Error {
  using Error::Error;
};

struct UnknownScenario : Error {
  using Error::Error;
};

struct DegenerateDirection : Error {
  using Error::Error;
};

struct NotDirectionallyDifferentiable : Error {
  using Error::Error;
};

// A check's stated hypothesis failed before the check could run.
// `kind` is one of: g-not-directionally-differentiable, f-not-lipschitz.
struct HypothesisFailure : Error {
  HypothesisFailure(std::string kind_, const std::string& what_)
      : Error(what_), kind(std::move(kind_)) {}
  std::string kind;
};

struct NotSpd : Error {
  using Error::Error;
};

struct AsymmetricInput : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

// Finite-difference probes left the SPD cone even after radius shrinking.
struct ConeViolation : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace lipdiff
