#include "tsgp/error.hpp"

namespace tsgp {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::NonNumericField: return "NonNumericField";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::TooFewInstances: return "TooFewInstances";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::PatchTooSmall: return "PatchTooSmall";
    case ErrorKind::PatchTooShort: return "PatchTooShort";
    case ErrorKind::KernelTooShort: return "KernelTooShort";
    case ErrorKind::KernelLongerThanPatch: return "KernelLongerThanPatch";
    case ErrorKind::EmptyMap: return "EmptyMap";
    case ErrorKind::InvalidTerminal: return "InvalidTerminal";
    case ErrorKind::InvalidTree: return "InvalidTree";
    case ErrorKind::InfeasibleDepth: return "InfeasibleDepth";
    case ErrorKind::MalformedModel: return "MalformedModel";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

bool is_data_error(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::FileNotFound:
    case ErrorKind::EmptyFile:
    case ErrorKind::RaggedRows:
    case ErrorKind::NonNumericField:
    case ErrorKind::NonFiniteValue:
    case ErrorKind::SeriesTooShort:
    case ErrorKind::SingleClass:
    case ErrorKind::UnknownLabel:
    case ErrorKind::TooFewInstances:
    case ErrorKind::LengthMismatch:
    case ErrorKind::MalformedModel:
    case ErrorKind::DegenerateInput:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message)
    , kind_(kind)
{
}

} // namespace tsgp
