#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dvnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Incompatible tensor/image extents.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Invalid argument value (radius < 1, even k, infeasible ratio, ...).
class ParamError : public Error {
public:
    using Error::Error;
};

// Bad training data (empty set, single class, non-finite features).
class DataError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

// Non-finite value where a finite one is required.
class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed serialized input; carries the offending byte offset.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : Error(msg + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_ = 0;
};

// Well-formed file whose contents contradict themselves (checkpoint
// parameter count vs. embedded architecture, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace dvnet
