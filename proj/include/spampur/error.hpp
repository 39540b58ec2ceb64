#pragma once

#include <stdexcept>
#include <string>

namespace spampur {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (dimension mismatch, non-square, bad qubit index).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its documented domain.
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// Parameters are valid but admit no purification (alpha == 1/2).
class DegenerateParams : public Error {
public:
    using Error::Error;
};

/// POVM elements do not sum to the identity.
class IncompletePovm : public Error {
public:
    using Error::Error;
};

/// Requested register exceeds the dense-simulation cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

} // namespace spampur
