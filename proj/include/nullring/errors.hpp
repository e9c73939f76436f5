#pragma once

#include <stdexcept>
#include <string>

namespace nullring {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource cap (enumeration size, sumset limit, refinement
/// depth, ...) would be exceeded. Retrying with a larger cap may succeed.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A base set failed validation (missing 0, not strictly increasing, or
/// its declared log-density bound is violated on the enumerated range).
class InvalidBaseError : public Error {
public:
    using Error::Error;
};

/// An index or argument fell outside the tabulated range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An element or other input value failed validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A witness failed its own recheck. This signals a defect in the library,
/// not bad input.
class CertificationError : public Error {
public:
    using Error::Error;
};

/// Bad command line input. Maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace nullring
