#pragma once

#include <stdexcept>
#include <string>

namespace restop {

// Invalid or out-of-domain input: bad parameters, malformed files, z <= 0.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model parameters fall in neither supported parameter regime.
struct RegimeViolation : DomainError {
  using DomainError::DomainError;
};

// Two grid-indexed objects built on different grids were combined.
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A root bracket could not be established where the structure requires one.
struct NoBracket : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative routine failed to reach its tolerance.
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration cap hit before the tolerance was met.
struct MaxIterations : NoConvergence {
  using NoConvergence::NoConvergence;
};

// A computed object violates a structural property it must satisfy
// (dominance, single continuation interval, ordering).
struct StructureViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The one-shot comparator fails a dominance or boundary ordering that
// must hold against the recursive solution.
struct OrderingViolation : StructureViolation {
  using StructureViolation::StructureViolation;
};

}  // namespace restop
