#pragma once

#include <stdexcept>
#include <string>

namespace plcrf {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All joints coincide, so the pose has no scale.
class DegeneratePoseError : public Error {
public:
    using Error::Error;
};

// A 3D point with Z <= 0 was handed to a perspective projection.
class BehindCameraError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

// Mean-shift window carries no weight.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

// Malformed, truncated or checksum-failing files.
class FormatError : public Error {
public:
    using Error::Error;
};

class VersionMismatchError : public FormatError {
public:
    using FormatError::FormatError;
};

// Invalid arguments or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

// Training produced NaN/Inf or another unrecoverable numeric state.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace plcrf
