#pragma once

#include <stdexcept>
#include <string>

namespace svcnch {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text; `line` is 1-based.
struct ParseError : Error {
    ParseError(int line_, const std::string& what_)
        : Error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
    int line;
};

struct EmptyInputError : Error {
    EmptyInputError() : Error("empty input: no samples found") {}
};

struct SingleClassError : Error {
    using Error::Error;
};

struct SplitError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct CorruptModelError : Error {
    using Error::Error;
};

struct VersionMismatchError : Error {
    VersionMismatchError(int found_, int expected_)
        : Error("model file version " + std::to_string(found_) + ", this build reads version " +
                std::to_string(expected_)),
          found(found_), expected(expected_) {}
    int found;
    int expected;
};

}  // namespace svcnch
