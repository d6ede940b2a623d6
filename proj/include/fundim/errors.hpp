#pragma once

#include <stdexcept>
#include <string>

namespace fundim {

// Base class for failures of an analysis on well-formed input. The CLI maps
// these to exit code 2; std::invalid_argument (malformed input) maps to 1.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A batch contains points whose ternary label has a zero entry.
class NonSmoothPointError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// No parametrically smooth point was found within the search budget.
class NonOrdinarySuspected : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// The cell structure changed under a finite-difference perturbation.
class CombinatorialInstability : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

class NoDetectableWall : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

}  // namespace fundim
