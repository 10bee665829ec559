#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adaptrust {

enum class ErrorKind {
    OutOfRange,
    EmptyInput,
    DimensionMismatch,
    LengthMismatch,
    BadArchitecture,
    NoSamples,
    ConfigInvalid,
    SchemaViolation,
    UnknownMetadataWord,
    UnratedUsage,
    ZeroExpectation,
    ZeroTotalDuration,
    EmptyHistory,
    TooFewRecords,
    UnknownMethod,
    DanglingReference,
    ParseError,
    VersionMismatch,
    IoError,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace adaptrust
