#pragma once

#include <stdexcept>
#include <string>

namespace foliage {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (config files, reference-tree files, CSV).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a documented invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem and stream failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace foliage
