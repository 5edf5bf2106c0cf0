#pragma once

#include <stdexcept>
#include <string>

namespace shearflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's precondition (non-finite values, bad sizes, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Evaluation at a point where the requested quantity does not exist
/// (e.g. the stress Jacobian at D = 0 with delta = 0).
class SingularPoint : public Error {
public:
    using Error::Error;
};

/// Parameter combination outside the range an estimate is valid for.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A time step was rejected or produced non-finite values.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace shearflow
