#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "voxseg/volume.hpp"

namespace voxseg {

// Result of intensity k-means over the whole grid. Centroids are sorted
// ascending and every voxel is assigned to the nearest centroid (ties go to
// the lower cluster id). `energy` is the L1 objective
//   E = sum_j sum_{x in C_j} |I(x) - mu_j|
// and `energy_history` records it once per Lloyd iteration.
struct ClusterModel {
    Dims dims;
    int k = 0;
    std::vector<double> centroids;
    std::vector<std::int32_t> assignment;
    double energy = 0.0;
    std::vector<double> energy_history;
};

struct SeedParams {
    std::optional<int> k;             // empty = estimate via mean shift
    std::optional<int> erosion_steps; // empty = max(1, round(min dim / 64))

    int resolve_erosion_steps(const Dims& dims) const;
};

// Number of intensity modes found by 1-D mean shift on a 256-bin histogram
// (Gaussian kernel, bandwidth 0.05, modes merged within half a bandwidth),
// clamped to [2, 8].
int estimate_k(const Volume& volume);

ClusterModel kmeans_cluster(const Volume& volume, int k);

// Keep only the cluster containing x0; all other clusters are discarded.
LabelMask select_seed_cluster(const ClusterModel& model, const VoxelIndex& x0);

// 6-connected morphology. A border voxel counts as adjacent to outside, so
// one erosion always detaches the mask from the domain boundary; dilation is
// clipped at the boundary.
LabelMask erode(const LabelMask& mask, int steps);
LabelMask dilate(const LabelMask& mask, int steps);

// Flood fill over 6-connected inside voxels starting at x0.
LabelMask connected_component(const LabelMask& mask, const VoxelIndex& x0);

// Full seeding pipeline: cluster, select by x0, erode, connected component,
// dilate. The result is non-empty, 6-connected, and contains x0.
LabelMask generate_seed(const Volume& volume, const VoxelIndex& x0, const SeedParams& params);

} // namespace voxseg
