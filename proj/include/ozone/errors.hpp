#pragma once

#include <stdexcept>
#include <string>

namespace ozone {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV cell, timestamp, model file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid data: duplicate or out-of-order stamps, misaligned series.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Data that is well-formed but cannot support the requested computation.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters, unknown names, inconsistent options.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Non-finite values appearing during training.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace ozone
