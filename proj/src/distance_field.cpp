#include "voxseg/distance_field.hpp"

#include <algorithm>
#include <cmath>

namespace voxseg {

namespace {

// Boundary voxels: inside with at least one in-bounds outside 6-neighbor.
std::vector<std::uint8_t> boundary_set(const LabelMask& mask) {
    const Dims d = mask.dims;
    std::vector<std::uint8_t> boundary(d.count(), 0);
    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                if (!mask.at(i, j, k)) continue;
                const bool edge = (i > 0 && !mask.at(i - 1, j, k)) ||
                                  (i + 1 < d.nx && !mask.at(i + 1, j, k)) ||
                                  (j > 0 && !mask.at(i, j - 1, k)) ||
                                  (j + 1 < d.ny && !mask.at(i, j + 1, k)) ||
                                  (k > 0 && !mask.at(i, j, k - 1)) ||
                                  (k + 1 < d.nz && !mask.at(i, j, k + 1));
                if (edge) boundary[d.index(i, j, k)] = 1;
            }
        }
    }
    return boundary;
}

// Solve [(x-a1)+]^2 + [(x-a2)+]^2 + [(x-a3)+]^2 = 1 for the smallest valid x,
// given a1 <= a2 <= a3 (unit grid spacing).
double eikonal_update(double a1, double a2, double a3) {
    double x = a1 + 1.0;
    if (x <= a2) return x;

    const double s2 = a1 + a2;
    x = 0.5 * (s2 + std::sqrt(std::max(0.0, 2.0 - (a1 - a2) * (a1 - a2))));
    if (x <= a3) return x;

    const double s3 = a1 + a2 + a3;
    const double q = s3 * s3 - 3.0 * (a1 * a1 + a2 * a2 + a3 * a3 - 1.0);
    return (s3 + std::sqrt(std::max(0.0, q))) / 3.0;
}

} // namespace

BoundaryField init_boundary(const LabelMask& mask) {
    const Dims d = mask.dims;
    const std::size_t inside_count = mask.count_inside();
    if (inside_count == 0) throw Error(ErrorCode::EmptyMask, "mask has no inside voxels");
    if (inside_count == d.count()) throw Error(ErrorCode::FullMask, "mask covers the whole domain");

    const std::vector<std::uint8_t> boundary = boundary_set(mask);

    BoundaryField field;
    field.dims = d;
    field.large = 10.0 * d.diagonal();
    field.dist.assign(d.count(), field.large);
    field.frozen.assign(d.count(), 0);
    field.inside = mask.in;

    // Exact values on the shell: each voxel in or 26-adjacent to the boundary
    // takes the min distance over boundary voxels inside its 26-neighborhood,
    // which is one of 0, 1, sqrt2, sqrt3.
    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                double best = field.large;
                if (boundary[d.index(i, j, k)]) {
                    best = 0.0;
                } else {
                    for (int dk = -1; dk <= 1; ++dk) {
                        for (int dj = -1; dj <= 1; ++dj) {
                            for (int di = -1; di <= 1; ++di) {
                                const int ni = i + di, nj = j + dj, nk = k + dk;
                                if (!d.contains(ni, nj, nk)) continue;
                                if (!boundary[d.index(ni, nj, nk)]) continue;
                                const double dist =
                                    std::sqrt(double(di * di + dj * dj + dk * dk));
                                best = std::min(best, dist);
                            }
                        }
                    }
                }
                if (best < field.large) {
                    const std::size_t idx = d.index(i, j, k);
                    field.dist[idx] = best;
                    field.frozen[idx] = 1;
                }
            }
        }
    }
    return field;
}

void sweep_pass(BoundaryField& field, int direction) {
    const Dims d = field.dims;
    const bool up_i = (direction & 1) == 0;
    const bool up_j = (direction & 2) == 0;
    const bool up_k = (direction & 4) == 0;

    const int i0 = up_i ? 0 : d.nx - 1, i1 = up_i ? d.nx : -1, di = up_i ? 1 : -1;
    const int j0 = up_j ? 0 : d.ny - 1, j1 = up_j ? d.ny : -1, dj = up_j ? 1 : -1;
    const int k0 = up_k ? 0 : d.nz - 1, k1 = up_k ? d.nz : -1, dk = up_k ? 1 : -1;

    auto value = [&](int i, int j, int k) {
        return d.contains(i, j, k) ? field.dist[d.index(i, j, k)] : field.large;
    };

    for (int k = k0; k != k1; k += dk) {
        for (int j = j0; j != j1; j += dj) {
            for (int i = i0; i != i1; i += di) {
                const std::size_t idx = d.index(i, j, k);
                if (field.frozen[idx]) continue;
                double a[3] = {
                    std::min(value(i - 1, j, k), value(i + 1, j, k)),
                    std::min(value(i, j - 1, k), value(i, j + 1, k)),
                    std::min(value(i, j, k - 1), value(i, j, k + 1)),
                };
                std::sort(std::begin(a), std::end(a));
                const double x = eikonal_update(a[0], a[1], a[2]);
                if (x < field.dist[idx]) field.dist[idx] = x;
            }
        }
    }
}

SignedDistanceField fast_sweep(BoundaryField field) {
    for (int dir = 0; dir < 8; ++dir) sweep_pass(field, dir);

    SignedDistanceField out;
    out.dims = field.dims;
    out.phi.resize(field.dist.size());
    for (std::size_t v = 0; v < field.dist.size(); ++v) {
        out.phi[v] = field.inside[v] ? -field.dist[v] : field.dist[v];
    }
    return out;
}

SignedDistanceField rebuild_sdf(const LabelMask& mask) {
    return fast_sweep(init_boundary(mask));
}

} // namespace voxseg
