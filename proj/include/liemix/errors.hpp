#pragma once

#include <stdexcept>
#include <string>

namespace liemix {

/// Operand shapes or group descriptors do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Logarithm requested outside the injectivity radius (e.g. SE(2) at |theta| = pi).
class SingularLogError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A covariance (or innovation covariance) is not symmetric positive-definite.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A truncated series did not reach its tolerance at the truncation order.
class SeriesConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (mixture, scenario or config files).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace liemix
