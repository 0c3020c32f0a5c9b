#ifndef MOSQGAME_ERRORS_HPP
#define MOSQGAME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mosqgame {

/// A model parameter violates its domain (non-positive rate, K_min >= K_max, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A phase-space point lies outside the invariant box.
class InvalidState : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base class for failures of the numerical machinery.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepSizeUnderflow : public NumericError {
public:
    using NumericError::NumericError;
};

class MaxStepsExceeded : public NumericError {
public:
    using NumericError::NumericError;
};

class InvalidInitialState : public NumericError {
public:
    using NumericError::NumericError;
};

class TrajectoryTooShort : public NumericError {
public:
    using NumericError::NumericError;
};

class InsufficientPeaks : public NumericError {
public:
    using NumericError::NumericError;
};

/// The theorem-based and eigenvalue-based stability verdicts disagree.
class AnalyticNumericMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

/// Malformed or unknown configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mosqgame

#endif
