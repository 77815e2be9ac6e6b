#pragma once

#include <stdexcept>
#include <string>

namespace regrade {

/// Base class for all regrade errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File could not be read or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Image file exists but is not in a supported format.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Input data cannot support the requested estimation
/// (rank deficiency, too few valid pixels, empty slots).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

/// Operands have mismatched dimensions.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Profile document is malformed; message carries the field path.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Profile document has a version this build does not understand.
class UnsupportedVersionError : public Error {
public:
    explicit UnsupportedVersionError(const std::string& msg) : Error(msg) {}
};

} // namespace regrade
