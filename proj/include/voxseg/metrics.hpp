#pragma once

#include <cstdint>

#include "voxseg/volume.hpp"

namespace voxseg {

struct AgreementReport {
    double dice = 0.0;    // 2|A∩B| / (|A|+|B|)
    double overlap = 0.0; // |A∩B| / min(|A|,|B|)
    std::uint64_t volume_a = 0;
    std::uint64_t volume_b = 0;
    std::uint64_t intersection = 0;
};

// Volumetric agreement between two masks of equal dims. One empty mask scores
// zero; two empty masks are an error.
AgreementReport compare(const LabelMask& a, const LabelMask& b);

} // namespace voxseg
