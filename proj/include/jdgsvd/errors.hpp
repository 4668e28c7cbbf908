#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jdgsvd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A Cholesky-type factorization met a non-positive pivot.
class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(const std::string& what, std::ptrdiff_t pivot)
        : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
    std::ptrdiff_t pivot() const noexcept { return pivot_; }

private:
    std::ptrdiff_t pivot_;
};

class BandwidthError : public Error {
public:
    using Error::Error;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Orthogonalization found a column numerically dependent on the previous ones.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string& what, std::ptrdiff_t column)
        : Error(what + " (column " + std::to_string(column) + ")"), column_(column) {}
    std::ptrdiff_t column() const noexcept { return column_; }

private:
    std::ptrdiff_t column_;
};

/// Appending a vector that already lies in the span of an orthonormal basis.
class InSpanError : public Error {
public:
    using Error::Error;
};

/// Subspace expansion with a vector numerically inside the current subspace.
class StagnationError : public Error {
public:
    using Error::Error;
};

/// A method-specific precondition on the matrix pair does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

}  // namespace jdgsvd
