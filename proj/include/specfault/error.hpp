#pragma once

#include <stdexcept>
#include <string>

namespace specfault {

// Caller passed something that violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data could not be decoded or does not satisfy a data invariant
// (malformed files, non-finite samples, short recordings, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure: missing file, unwritable path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace specfault
