#pragma once

#include <stdexcept>
#include <string>

namespace critdecay {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad parameters, mismatched grids, unknown kinds.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A spectral assumption needed by the requested computation is violated.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

/// Numerical procedure did not reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse or too short for the requested transform.
class ResolutionError : public Error {
public:
    using Error::Error;
};

} // namespace critdecay
