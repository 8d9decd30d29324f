#pragma once

#include <stdexcept>
#include <string>

namespace voxseg {

// Machine-readable failure categories. The CLI prints the category name
// verbatim so batch harnesses can dispatch on it.
enum class ErrorCode {
    NonFiniteInput,
    DegenerateVolume,
    EmptyClusterCollapse,
    SeedNotInMask,
    SeedEroded,
    EmptyMask,
    FullMask,
    EmptyRegion,
    NoZeroCrossing,
    SurfaceTouchesBorder,
    DimensionMismatch,
    BothEmpty,
    HeaderPayloadMismatch,
    UnknownDtype,
    MalformedHeader,
    MalformedMask,
    IndexOutOfRange,
    IoFailure,
    GeometryOutOfBounds,
    InvalidParams,
    MalformedConfig,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace voxseg
