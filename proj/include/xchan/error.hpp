#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xchan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An invariant was violated by a measurable amount; `residual()` reports it.
class ResidualError : public Error {
public:
    ResidualError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NotHermitianError : public ResidualError {
public:
    using ResidualError::ResidualError;
};

class NotUnitTraceError : public ResidualError {
public:
    using ResidualError::ResidualError;
};

class NotPsdError : public ResidualError {
public:
    using ResidualError::ResidualError;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Kraus set failing the completeness relation, or a state/unitary failing validation.
class ValidationError : public ResidualError {
public:
    using ResidualError::ResidualError;
};

/// Sum of squared diagonal entries in one column exceeds 1.
class ColumnOverflowError : public Error {
public:
    ColumnOverflowError(std::size_t column, double excess)
        : Error("column " + std::to_string(column) + " overflows by " + std::to_string(excess)),
          column_(column), excess_(excess) {}

    std::size_t column() const noexcept { return column_; }
    double excess() const noexcept { return excess_; }

private:
    std::size_t column_;
    double excess_;
};

class SingularComplementError : public Error {
public:
    SingularComplementError(double smallest_eigenvalue)
        : Error("I - A_drop is singular (smallest eigenvalue " +
                std::to_string(smallest_eigenvalue) + ")"),
          smallest_(smallest_eigenvalue) {}

    double smallest_eigenvalue() const noexcept { return smallest_; }

private:
    double smallest_;
};

class BoundaryParameterError : public Error {
public:
    using Error::Error;
};

}  // namespace xchan
