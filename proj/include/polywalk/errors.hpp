#pragma once

#include <stdexcept>
#include <string>

namespace polywalk {

/// Vector/matrix sizes that do not agree with the object they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point that lies outside the domain (beyond tolerance) or too close to its boundary.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A metric tensor that cannot be turned into a covariance factor.
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polywalk
