#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "voxseg/error.hpp"

namespace voxseg {

struct Dims {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    std::size_t count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool contains(int i, int j, int k) const {
        return i >= 0 && i < nx && j >= 0 && j < ny && k >= 0 && k < nz;
    }
    // Row-major, i fastest. Fixed so raw files are bit-exact across writers.
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
    }
    double diagonal() const {
        return std::sqrt(double(nx) * nx + double(ny) * ny + double(nz) * nz);
    }
    bool operator==(const Dims&) const = default;
};

struct VoxelIndex {
    int i = 0;
    int j = 0;
    int k = 0;
    bool operator==(const VoxelIndex&) const = default;
};

struct Spacing {
    double sx = 1.0;
    double sy = 1.0;
    double sz = 1.0;
    bool operator==(const Spacing&) const = default;
};

// Dense scalar grid. Spacing is carried for provenance only; every algorithm
// in this library works in voxel units on a unit grid.
struct Volume {
    Dims dims;
    Spacing spacing;
    std::vector<float> data;

    float at(int i, int j, int k) const { return data[dims.index(i, j, k)]; }
    float& at(int i, int j, int k) { return data[dims.index(i, j, k)]; }
    float at(const VoxelIndex& v) const { return at(v.i, v.j, v.k); }
};

Volume make_volume(Dims dims, float fill = 0.0f, Spacing spacing = {});

// Binary voxel membership; 1 = inside the structure.
struct LabelMask {
    Dims dims;
    std::vector<std::uint8_t> in;

    bool at(int i, int j, int k) const { return in[dims.index(i, j, k)] != 0; }
    bool at(const VoxelIndex& v) const { return at(v.i, v.j, v.k); }
    void set(int i, int j, int k, bool inside) { in[dims.index(i, j, k)] = inside ? 1 : 0; }
    std::size_t count_inside() const;
    bool operator==(const LabelMask&) const = default;
};

LabelMask make_mask(Dims dims, bool fill = false);

enum class Connectivity { Six = 6, TwentySix = 26 };

// In-bounds neighbors in a fixed order: -i, +i, -j, +j, -k, +k, then the
// remaining 26-connectivity offsets sorted lexicographically by (di, dj, dk).
std::vector<VoxelIndex> neighbors(const VoxelIndex& v, Connectivity conn, const Dims& dims);

// Nearest-rank-low percentile: sort all voxel values and take the element at
// index floor(p/100 * (N-1)).
double percentile(const Volume& volume, double p);

// Rescale to [0,1] with the 2nd/98th percentiles mapped to the endpoints and
// everything outside clamped. A flat volume maps to all zeros.
Volume normalize(const Volume& volume);

} // namespace voxseg
