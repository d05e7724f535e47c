#pragma once

#include <stdexcept>
#include <string>

namespace pulseforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violated the invariant of its domain type (norm, hermiticity, PSD, unitarity).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A pulse envelope sample exceeded unit magnitude.
class AmplitudeCapError : public Error {
public:
    using Error::Error;
};

/// Integrator drift exceeded the accepted bound; raise the substep count.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// A finite-difference probe produced a non-finite loss.
class GradientError : public Error {
public:
    using Error::Error;
};

/// Training loss stayed far above its starting value.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed user input: config files, specs, CLI arguments.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pulseforge
