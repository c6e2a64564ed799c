#pragma once

#include <stdexcept>
#include <string>

namespace rcrc {

// Malformed or inconsistent input data (exit code 1 at the CLI).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad invocation: unknown flag, invalid config value (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A character span that cannot be projected onto any token.
class AlignmentError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace rcrc
