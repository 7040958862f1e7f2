#pragma once

#include <stdexcept>
#include <string>

namespace relgrid {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an amplitude vector has zero norm and cannot be normalized.
class ZeroNormError : public Error {
public:
    using Error::Error;
};

// Raised when an amplitude vector length is not a power of two >= 4.
class BadLengthError : public Error {
public:
    using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

// Raised for perturbation orders outside the supported range.
class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

// Raised by the boundary-correction measurement path when the state has
// non-real amplitudes and the caller did not set the explicit override.
class ComplexAmplitudesError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class ParamLengthError : public Error {
public:
    using Error::Error;
};

class NonpositiveWidthError : public Error {
public:
    using Error::Error;
};

// Raised when a dense-matrix routine is asked for more qubits than the
// dense solver budget allows.
class TooLargeError : public Error {
public:
    using Error::Error;
};

// Invalid run configuration (bad schema, bad enum value, bad dimensions).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace relgrid
