#include "voxseg/error.hpp"

namespace voxseg {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::DegenerateVolume: return "DegenerateVolume";
        case ErrorCode::EmptyClusterCollapse: return "EmptyClusterCollapse";
        case ErrorCode::SeedNotInMask: return "SeedNotInMask";
        case ErrorCode::SeedEroded: return "SeedEroded";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::FullMask: return "FullMask";
        case ErrorCode::EmptyRegion: return "EmptyRegion";
        case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
        case ErrorCode::SurfaceTouchesBorder: return "SurfaceTouchesBorder";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::BothEmpty: return "BothEmpty";
        case ErrorCode::HeaderPayloadMismatch: return "HeaderPayloadMismatch";
        case ErrorCode::UnknownDtype: return "UnknownDtype";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::MalformedMask: return "MalformedMask";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::GeometryOutOfBounds: return "GeometryOutOfBounds";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::MalformedConfig: return "MalformedConfig";
    }
    return "UnknownError";
}

} // namespace voxseg
