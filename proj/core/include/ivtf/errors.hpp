#pragma once

#include <stdexcept>
#include <string>

namespace ivtf {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Control matrix is rank deficient.
class SingularDesignError : public Error
{
  public:
    using Error::Error;
};

/// Instrument carries no information about the regressor (z'x = 0 or z = 0).
class NoIdentificationError : public Error
{
  public:
    using Error::Error;
};

/// AR denominator vanishes: t = 0 and f = 0.
class DegenerateSpecificationError : public Error
{
  public:
    using Error::Error;
};

/// rho cannot be backed out of (t, f, AR); AR = 0 or t = 0.
class NotRecoverableError : public Error
{
  public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (|rho| > 1, se <= 0, ...).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// Malformed tabular input. The message lists every offending row.
class ValidationError : public Error
{
  public:
    using Error::Error;
};

}  // namespace ivtf
