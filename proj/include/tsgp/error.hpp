#pragma once

#include <stdexcept>
#include <string>

namespace tsgp {

enum class ErrorKind {
    // dataset ingestion and splitting
    FileNotFound,
    EmptyFile,
    RaggedRows,
    NonNumericField,
    NonFiniteValue,
    SeriesTooShort,
    SingleClass,
    UnknownLabel,
    TooFewInstances,
    LengthMismatch,
    // pipeline primitives
    OutOfRange,
    TooShort,
    PatchTooSmall,
    PatchTooShort,
    KernelTooShort,
    KernelLongerThanPatch,
    EmptyMap,
    InvalidTerminal,
    // programs and models
    InvalidTree,
    InfeasibleDepth,
    MalformedModel,
    DegenerateInput,
    // configuration
    InvalidConfig,
};

const char* to_string(ErrorKind kind) noexcept;

/// Input/data problems (bad files, mismatched lengths, malformed models).
bool is_data_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace tsgp
