#pragma once

#include <stdexcept>
#include <string>

namespace froglab {

/// Thrown when a model parameter or argument violates its documented range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an argument lies outside the domain of a function (e.g. x >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a computation would exceed a configured cost cap.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A conditional estimator saw too few conditioning events to be meaningful.
class InsufficientEvents : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace froglab
