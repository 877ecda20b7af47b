#pragma once

#include <stdexcept>
#include <string>

namespace rbon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes disagree with what an operation expects.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Caller violated a documented precondition (bad sizes, counts, ranges).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Every radial basis output vanished, so the normalized feature vector is undefined.
class DegenerateFeatureError : public Error {
public:
    using Error::Error;
};

/// NaN or infinity where finite values are required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// A model or dataset file could not be decoded.
class CorruptFileError : public Error {
public:
    using Error::Error;
};

/// A file was written by a newer (or unknown) format version.
class VersionMismatchError : public Error {
public:
    using Error::Error;
};

/// Malformed or duplicate records while ingesting tabular data.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A CFL-type stability bound for an explicit solver was violated.
class StabilityError : public Error {
public:
    using Error::Error;
};

} // namespace rbon
