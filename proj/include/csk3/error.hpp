#pragma once

#include <stdexcept>
#include <string>

namespace csk3 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trial division could not finish within the configured bound.
class FactorizationBudgetExceeded : public Error {
public:
    explicit FactorizationBudgetExceeded(const std::string& what)
        : Error("factorization budget exceeded: " + what) {}
};

/// A point handed to an operation does not satisfy the curve equation.
class OffCurve : public Error {
public:
    using Error::Error;
};

/// A birational map was evaluated on its exceptional set. Retrying with a
/// translated input usually succeeds.
class ExceptionalPoint : public Error {
public:
    using Error::Error;
};

/// p-adic solubility could not be decided at the requested depth.
class PrecisionExceeded : public Error {
public:
    using Error::Error;
};

/// Malformed parameters (non-squarefree twist, zero input, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace csk3
