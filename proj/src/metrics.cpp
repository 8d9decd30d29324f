#include "voxseg/metrics.hpp"

#include <algorithm>

namespace voxseg {

AgreementReport compare(const LabelMask& a, const LabelMask& b) {
    if (!(a.dims == b.dims)) {
        throw Error(ErrorCode::DimensionMismatch, "mask dims differ");
    }

    AgreementReport r;
    for (std::size_t v = 0; v < a.in.size(); ++v) {
        r.volume_a += a.in[v] != 0;
        r.volume_b += b.in[v] != 0;
        r.intersection += (a.in[v] != 0) && (b.in[v] != 0);
    }
    if (r.volume_a == 0 && r.volume_b == 0) {
        throw Error(ErrorCode::BothEmpty, "both masks are empty");
    }
    if (r.volume_a == 0 || r.volume_b == 0) {
        return r; // a collapsed segmentation scores zero rather than erroring
    }
    r.dice = 2.0 * static_cast<double>(r.intersection) /
             static_cast<double>(r.volume_a + r.volume_b);
    r.overlap = static_cast<double>(r.intersection) /
                static_cast<double>(std::min(r.volume_a, r.volume_b));
    return r;
}

} // namespace voxseg
