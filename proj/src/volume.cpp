#include "voxseg/volume.hpp"

#include <algorithm>
#include <numeric>

namespace voxseg {

Volume make_volume(Dims dims, float fill, Spacing spacing) {
    Volume v;
    v.dims = dims;
    v.spacing = spacing;
    v.data.assign(dims.count(), fill);
    return v;
}

LabelMask make_mask(Dims dims, bool fill) {
    LabelMask m;
    m.dims = dims;
    m.in.assign(dims.count(), fill ? 1 : 0);
    return m;
}

std::size_t LabelMask::count_inside() const {
    return static_cast<std::size_t>(std::count(in.begin(), in.end(), std::uint8_t{1}));
}

std::vector<VoxelIndex> neighbors(const VoxelIndex& v, Connectivity conn, const Dims& dims) {
    static constexpr int face[6][3] = {
        {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1},
    };

    std::vector<VoxelIndex> out;
    out.reserve(conn == Connectivity::Six ? 6 : 26);
    for (const auto& d : face) {
        VoxelIndex n{v.i + d[0], v.j + d[1], v.k + d[2]};
        if (dims.contains(n.i, n.j, n.k)) out.push_back(n);
    }
    if (conn == Connectivity::Six) return out;

    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            for (int dk = -1; dk <= 1; ++dk) {
                const int nz = (di != 0) + (dj != 0) + (dk != 0);
                if (nz < 2) continue; // center and face offsets already handled
                VoxelIndex n{v.i + di, v.j + dj, v.k + dk};
                if (dims.contains(n.i, n.j, n.k)) out.push_back(n);
            }
        }
    }
    return out;
}

double percentile(const Volume& volume, double p) {
    if (volume.data.empty()) throw Error(ErrorCode::InvalidParams, "percentile of empty volume");
    std::vector<float> sorted(volume.data);
    std::sort(sorted.begin(), sorted.end());
    const auto last = sorted.size() - 1;
    const auto idx = static_cast<std::size_t>(std::floor(p / 100.0 * static_cast<double>(last)));
    return static_cast<double>(sorted[std::min(idx, last)]);
}

Volume normalize(const Volume& volume) {
    if (volume.data.empty()) throw Error(ErrorCode::InvalidParams, "normalize of empty volume");
    for (float v : volume.data) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "volume contains NaN or Inf");
    }

    const double lo = percentile(volume, 2.0);
    const double hi = percentile(volume, 98.0);

    Volume out = volume;
    if (hi == lo) {
        std::fill(out.data.begin(), out.data.end(), 0.0f);
        return out;
    }
    const double scale = 1.0 / (hi - lo);
    for (float& v : out.data) {
        v = static_cast<float>(std::clamp((static_cast<double>(v) - lo) * scale, 0.0, 1.0));
    }
    return out;
}

} // namespace voxseg
