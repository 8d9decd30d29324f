#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "voxseg/volume.hpp"

namespace voxseg {

// Signed Euclidean distance in voxel units: phi <= 0 inside, phi > 0 outside.
struct SignedDistanceField {
    Dims dims;
    std::vector<double> phi;
    double band_width = std::numeric_limits<double>::infinity();

    double at(int i, int j, int k) const { return phi[dims.index(i, j, k)]; }
    double& at(int i, int j, int k) { return phi[dims.index(i, j, k)]; }
    double at(const VoxelIndex& v) const { return at(v.i, v.j, v.k); }
};

// Unsigned working state between boundary initialization and sweeping.
// Voxels on or next to the mask boundary hold exact distances and are frozen;
// everything else starts at `large`.
struct BoundaryField {
    Dims dims;
    std::vector<double> dist;
    std::vector<std::uint8_t> frozen;
    std::vector<std::uint8_t> inside;
    double large = 0.0;
};

// Exact distances on the boundary shell: every voxel in or 26-adjacent to the
// mask boundary gets min ||x - y|| over boundary voxels y in its own
// 26-neighborhood (values 0, 1, sqrt2, sqrt3). The boundary set is the inside
// voxels with an outside 6-neighbor.
BoundaryField init_boundary(const LabelMask& mask);

// One directional Gauss-Seidel pass; direction index 0..7 selects the sign of
// each axis traversal. Exposed so tests can watch per-sweep monotonicity.
void sweep_pass(BoundaryField& field, int direction);

// Eight sweeps (one per corner), then sign from the mask membership.
SignedDistanceField fast_sweep(BoundaryField field);

SignedDistanceField rebuild_sdf(const LabelMask& mask);

} // namespace voxseg
