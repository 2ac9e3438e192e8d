#pragma once

#include <stdexcept>
#include <string>

namespace fdal {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters outside the region where an algorithm has been validated.
class UnsupportedRegion : public Error {
public:
    using Error::Error;
};

/// Numerical Laplace inversion produced non-finite values.
class InversionError : public Error {
public:
    using Error::Error;
};

/// Quadrature could not meet its tolerance or tail bound.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Request for a density of a degenerate (deterministic) subordinator.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

/// Initial data not in the range of the operator on some Fourier bin.
class RangeConditionError : public Error {
public:
    using Error::Error;
};

/// Linear solve or time-marching failure.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Lattice window does not carry enough probability mass.
class MassDeficit : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw DomainError(what);
}

} // namespace detail
} // namespace fdal
