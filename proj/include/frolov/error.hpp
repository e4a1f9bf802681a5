#pragma once

#include <stdexcept>
#include <string>

namespace frolov {

/// Invalid input to an operation: bad dimension, malformed box, inconsistent
/// configuration. Callers at the CLI boundary report these as usage errors.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A computation broke down numerically: root refinement did not converge,
/// a matrix is singular, a node budget exceeds the candidate cap.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace frolov
