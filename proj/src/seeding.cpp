#include "voxseg/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace voxseg {

namespace {

constexpr int kHistogramBins = 256;
constexpr double kMeanShiftBandwidth = 0.05;
constexpr double kMeanShiftTol = 1e-4;
constexpr int kMeanShiftMaxIters = 1000;
constexpr int kKMeansMaxIters = 100;

double quantile_value(std::vector<float> sorted, double q) {
    const auto last = sorted.size() - 1;
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(last)));
    return static_cast<double>(sorted[std::min(idx, last)]);
}

// Assign every intensity to the nearest centroid, ties to the lower id.
// Returns the L1 objective for this assignment.
double assign_clusters(const std::vector<float>& data, const std::vector<double>& centroids,
                       std::vector<std::int32_t>& assignment) {
    double energy = 0.0;
    for (std::size_t v = 0; v < data.size(); ++v) {
        const double x = data[v];
        int best = 0;
        double best_d = std::abs(x - centroids[0]);
        for (int j = 1; j < static_cast<int>(centroids.size()); ++j) {
            const double d = std::abs(x - centroids[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        assignment[v] = best;
        energy += best_d;
    }
    return energy;
}

} // namespace

int SeedParams::resolve_erosion_steps(const Dims& dims) const {
    if (erosion_steps) return *erosion_steps;
    const int min_dim = std::min({dims.nx, dims.ny, dims.nz});
    return std::max(1, static_cast<int>(std::lround(min_dim / 64.0)));
}

int estimate_k(const Volume& volume) {
    const auto [mn, mx] = std::minmax_element(volume.data.begin(), volume.data.end());
    if (*mn == *mx) throw Error(ErrorCode::DegenerateVolume, "all intensities equal");

    // Histogram representation keeps each mean-shift iteration O(bins^2).
    std::vector<double> weight(kHistogramBins, 0.0);
    for (float v : volume.data) {
        int b = static_cast<int>(std::clamp(v, 0.0f, 1.0f) * kHistogramBins);
        if (b == kHistogramBins) b = kHistogramBins - 1;
        weight[static_cast<std::size_t>(b)] += 1.0;
    }
    std::vector<double> center(kHistogramBins);
    for (int b = 0; b < kHistogramBins; ++b) center[b] = (b + 0.5) / kHistogramBins;

    std::vector<double> modes;
    for (int b = 0; b < kHistogramBins; ++b) {
        if (weight[b] > 0.0) modes.push_back(center[b]);
    }

    const double inv2h2 = 1.0 / (2.0 * kMeanShiftBandwidth * kMeanShiftBandwidth);
    for (int iter = 0; iter < kMeanShiftMaxIters; ++iter) {
        double max_move = 0.0;
        for (double& m : modes) {
            double num = 0.0, den = 0.0;
            for (int b = 0; b < kHistogramBins; ++b) {
                if (weight[b] == 0.0) continue;
                const double d = center[b] - m;
                const double w = weight[b] * std::exp(-d * d * inv2h2);
                num += w * center[b];
                den += w;
            }
            const double next = num / den;
            max_move = std::max(max_move, std::abs(next - m));
            m = next;
        }
        if (max_move < kMeanShiftTol) break;
    }

    // Merge converged modes closer than half a bandwidth, then count groups.
    std::sort(modes.begin(), modes.end());
    int groups = 0;
    double prev = -1.0;
    for (double m : modes) {
        if (groups == 0 || m - prev > kMeanShiftBandwidth / 2.0) {
            ++groups;
            prev = m;
        } else {
            prev = m; // chain merge: compare against the latest member
        }
    }
    return std::clamp(groups, 2, 8);
}

ClusterModel kmeans_cluster(const Volume& volume, int k) {
    if (k < 2) throw Error(ErrorCode::InvalidParams, "k must be at least 2");
    if (volume.data.empty()) throw Error(ErrorCode::InvalidParams, "empty volume");

    std::vector<float> sorted(volume.data);
    std::sort(sorted.begin(), sorted.end());

    ClusterModel model;
    model.dims = volume.dims;
    model.k = k;
    model.centroids.resize(k);
    for (int j = 0; j < k; ++j) {
        model.centroids[j] = quantile_value(sorted, (2.0 * j + 1.0) / (2.0 * k));
    }
    model.assignment.assign(volume.data.size(), 0);

    std::vector<int> reseed_failures(k, 0);
    std::vector<std::int32_t> prev_assignment;

    std::vector<double> prev_centroids;

    for (int iter = 0; iter < kKMeansMaxIters; ++iter) {
        const double energy = assign_clusters(volume.data, model.centroids, model.assignment);

        // Mean updates optimize the squared error, so late micro-adjustments
        // can push the absolute objective back up; keep the best state and
        // stop rather than accept a worsening step.
        if (!model.energy_history.empty() && energy > model.energy_history.back() + 1e-12) {
            model.centroids = prev_centroids;
            model.assignment = prev_assignment;
            break;
        }
        model.energy_history.push_back(energy);

        std::vector<double> sum(k, 0.0);
        std::vector<std::int64_t> count(k, 0);
        for (std::size_t v = 0; v < volume.data.size(); ++v) {
            sum[model.assignment[v]] += volume.data[v];
            ++count[model.assignment[v]];
        }
        const bool any_empty = std::any_of(count.begin(), count.end(),
                                           [](std::int64_t c) { return c == 0; });
        if (!any_empty && iter > 0 && model.assignment == prev_assignment) break;
        prev_assignment = model.assignment;
        prev_centroids = model.centroids;

        for (int j = 0; j < k; ++j) {
            if (count[j] > 0) {
                model.centroids[j] = sum[j] / static_cast<double>(count[j]);
                reseed_failures[j] = 0;
                continue;
            }
            if (reseed_failures[j] >= 2) {
                throw Error(ErrorCode::EmptyClusterCollapse,
                            "cluster " + std::to_string(j) + " stayed empty after reseeding");
            }
            ++reseed_failures[j];
            // Re-seed at the intensity farthest from its nearest surviving centroid.
            double best_val = model.centroids[j];
            double best_gap = -1.0;
            for (float x : volume.data) {
                double nearest = std::numeric_limits<double>::max();
                for (int s = 0; s < k; ++s) {
                    if (count[s] == 0) continue;
                    nearest = std::min(nearest, std::abs(x - model.centroids[s]));
                }
                if (nearest > best_gap) {
                    best_gap = nearest;
                    best_val = x;
                }
            }
            model.centroids[j] = best_val;
        }
    }

    // Present centroids in ascending order and make the stored assignment
    // consistent with them (lowest id wins ties).
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return model.centroids[a] < model.centroids[b]; });
    std::vector<double> sorted_centroids(k);
    for (int j = 0; j < k; ++j) sorted_centroids[j] = model.centroids[order[j]];
    model.centroids = std::move(sorted_centroids);
    model.energy = assign_clusters(volume.data, model.centroids, model.assignment);
    return model;
}

LabelMask select_seed_cluster(const ClusterModel& model, const VoxelIndex& x0) {
    if (!model.dims.contains(x0.i, x0.j, x0.k)) {
        throw Error(ErrorCode::IndexOutOfRange, "seed point outside volume");
    }
    const std::int32_t id = model.assignment[model.dims.index(x0.i, x0.j, x0.k)];
    LabelMask mask = make_mask(model.dims);
    for (std::size_t v = 0; v < model.assignment.size(); ++v) {
        mask.in[v] = model.assignment[v] == id ? 1 : 0;
    }
    return mask;
}

LabelMask erode(const LabelMask& mask, int steps) {
    const Dims d = mask.dims;
    LabelMask cur = mask;
    for (int s = 0; s < steps; ++s) {
        LabelMask next = cur;
        for (int k = 0; k < d.nz; ++k) {
            for (int j = 0; j < d.ny; ++j) {
                for (int i = 0; i < d.nx; ++i) {
                    if (!cur.at(i, j, k)) continue;
                    bool boundary = i == 0 || i == d.nx - 1 || j == 0 || j == d.ny - 1 ||
                                    k == 0 || k == d.nz - 1;
                    if (!boundary) {
                        boundary = !cur.at(i - 1, j, k) || !cur.at(i + 1, j, k) ||
                                   !cur.at(i, j - 1, k) || !cur.at(i, j + 1, k) ||
                                   !cur.at(i, j, k - 1) || !cur.at(i, j, k + 1);
                    }
                    if (boundary) next.set(i, j, k, false);
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

LabelMask dilate(const LabelMask& mask, int steps) {
    const Dims d = mask.dims;
    LabelMask cur = mask;
    for (int s = 0; s < steps; ++s) {
        LabelMask next = cur;
        for (int k = 0; k < d.nz; ++k) {
            for (int j = 0; j < d.ny; ++j) {
                for (int i = 0; i < d.nx; ++i) {
                    if (cur.at(i, j, k)) continue;
                    const bool touches = (i > 0 && cur.at(i - 1, j, k)) ||
                                         (i + 1 < d.nx && cur.at(i + 1, j, k)) ||
                                         (j > 0 && cur.at(i, j - 1, k)) ||
                                         (j + 1 < d.ny && cur.at(i, j + 1, k)) ||
                                         (k > 0 && cur.at(i, j, k - 1)) ||
                                         (k + 1 < d.nz && cur.at(i, j, k + 1));
                    if (touches) next.set(i, j, k, true);
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

LabelMask connected_component(const LabelMask& mask, const VoxelIndex& x0) {
    if (!mask.dims.contains(x0.i, x0.j, x0.k) || !mask.at(x0)) {
        throw Error(ErrorCode::SeedNotInMask, "flood fill start point is not inside the mask");
    }
    LabelMask out = make_mask(mask.dims);
    std::deque<VoxelIndex> queue{x0};
    out.set(x0.i, x0.j, x0.k, true);
    while (!queue.empty()) {
        const VoxelIndex v = queue.front();
        queue.pop_front();
        for (const VoxelIndex& n : neighbors(v, Connectivity::Six, mask.dims)) {
            if (mask.at(n) && !out.at(n)) {
                out.set(n.i, n.j, n.k, true);
                queue.push_back(n);
            }
        }
    }
    return out;
}

LabelMask generate_seed(const Volume& volume, const VoxelIndex& x0, const SeedParams& params) {
    if (!volume.dims.contains(x0.i, x0.j, x0.k)) {
        throw Error(ErrorCode::IndexOutOfRange, "seed point outside volume");
    }
    const int k = params.k ? *params.k : estimate_k(volume);
    const int steps = params.resolve_erosion_steps(volume.dims);

    const ClusterModel model = kmeans_cluster(volume, k);
    LabelMask mask = select_seed_cluster(model, x0);

    for (int s = 0; s < steps; ++s) {
        mask = erode(mask, 1);
        if (!mask.at(x0)) {
            throw Error(ErrorCode::SeedEroded,
                        "seed point eroded away at step " + std::to_string(s + 1) +
                            "; retry with fewer erosion steps");
        }
    }
    mask = connected_component(mask, x0);
    return dilate(mask, steps);
}

} // namespace voxseg
