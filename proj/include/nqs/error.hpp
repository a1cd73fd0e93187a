#pragma once

#include <stdexcept>
#include <string>

namespace nqs {

/// Base of all library errors. `exit_code()` is the process status the CLI
/// reports for this category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept { return 4; }
};

/// Bad argument, shape mismatch, or malformed configuration.
class ArgumentError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Problem size beyond what an exact workflow can hold in memory.
class CapacityError : public Error {
public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

/// Numerical failure: non-convergence, NaN, singular systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A series required to converge does not (e.g. δ_P ≤ 1).
class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An operation was called outside the domain where its result is defined.
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ArgumentError(what);
}

}  // namespace detail
}  // namespace nqs
