#pragma once

#include <stdexcept>
#include <string>

namespace rankspectra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input or argument falls outside the domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative solver or root bracketing ran out of budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Linear-algebra backend failure (eigensolver did not converge, etc).
class NumericalError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// A column with zero sample variance was passed to a correlation routine.
class DegenerateColumnError : public Error {
public:
    using Error::Error;
};

/// A spiked and a bulk eigenvalue coincide exactly.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, file or law string.
class ConfigError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class UnknownDistributionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace rankspectra
