#pragma once

#include <stdexcept>
#include <string>

namespace latalign {

// Process exit codes used by the CLI; each error family maps to one.
enum class ExitCode : int {
    kOk = 0,
    kConfig = 2,
    kData = 3,
    kNumeric = 4,
    kInternal = 5,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::kInternal; }
};

/// Invalid configuration, shapes that do not line up, bad CLI usage.
class ConfigError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

/// Malformed or inconsistent input data (parse errors, duplicate keys, missing files).
class DataError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

/// A caller broke an operation's precondition on otherwise valid data.
class PreconditionError : public DataError {
public:
    using DataError::DataError;
};

/// Non-finite values produced during evaluation or optimization.
class NumericError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kNumeric; }
};

}  // namespace latalign
