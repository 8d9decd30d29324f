#include "voxseg/levelset.hpp"

#include <algorithm>
#include <cmath>

namespace voxseg {

namespace {

constexpr double kCurvatureEps = 1e-8;

// True when a sign change sits within two voxels of a voxel outside the
// band, i.e. the front is running out of valid distance values.
bool front_near_band_rim(const SignedDistanceField& field, double band_width) {
    if (!std::isfinite(band_width)) return false;
    const Dims d = field.dims;
    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                const double p = field.at(i, j, k);
                const bool crossing = (i + 1 < d.nx && (p <= 0.0) != (field.at(i + 1, j, k) <= 0.0)) ||
                                      (j + 1 < d.ny && (p <= 0.0) != (field.at(i, j + 1, k) <= 0.0)) ||
                                      (k + 1 < d.nz && (p <= 0.0) != (field.at(i, j, k + 1) <= 0.0));
                if (!crossing) continue;
                for (int dk = -2; dk <= 2; ++dk) {
                    for (int dj = -2; dj <= 2; ++dj) {
                        for (int di = -2; di <= 2; ++di) {
                            const int ni = i + di, nj = j + dj, nk = k + dk;
                            if (!d.contains(ni, nj, nk)) continue;
                            if (std::abs(field.at(ni, nj, nk)) > band_width) return true;
                        }
                    }
                }
            }
        }
    }
    return false;
}

} // namespace

void validate(const EvolutionParams& p) {
    if (p.alpha < 0.0 || p.gamma1 < 0.0 || p.gamma2 < 0.0) {
        throw Error(ErrorCode::InvalidParams, "alpha, gamma1, gamma2 must be non-negative");
    }
    if (!(p.dt > 0.0)) throw Error(ErrorCode::InvalidParams, "dt must be positive");
    if (!(p.band_width > 0.0)) throw Error(ErrorCode::InvalidParams, "bandWidth must be positive");
    if (p.reinit_every < 1) throw Error(ErrorCode::InvalidParams, "reinitEvery must be positive");
    if (p.max_iters < 1) throw Error(ErrorCode::InvalidParams, "maxIters must be positive");
    if (p.convergence_tol < 0.0) {
        throw Error(ErrorCode::InvalidParams, "convergenceTol must be non-negative");
    }
    if (p.convergence_window < 1) {
        throw Error(ErrorCode::InvalidParams, "convergenceWindow must be positive");
    }
    const double budget = p.dt * (6.0 * p.alpha + std::abs(p.beta) + p.gamma1 + p.gamma2);
    if (budget > 1.0) {
        throw Error(ErrorCode::InvalidParams,
                    "unstable step: dt*(6*alpha + |beta| + gamma1 + gamma2) = " +
                        std::to_string(budget) + " exceeds 1");
    }
}

RegionStats region_stats(const Volume& volume, const SignedDistanceField& field) {
    if (volume.dims != field.dims) {
        throw Error(ErrorCode::DimensionMismatch, "volume and field dims differ");
    }
    RegionStats stats;
    double sum_in = 0.0, sum_out = 0.0;
    for (std::size_t v = 0; v < field.phi.size(); ++v) {
        if (field.phi[v] <= 0.0) {
            sum_in += volume.data[v];
            ++stats.count_inside;
        } else {
            sum_out += volume.data[v];
            ++stats.count_outside;
        }
    }
    if (stats.count_inside == 0 || stats.count_outside == 0) {
        throw Error(ErrorCode::EmptyRegion, stats.count_inside == 0 ? "front collapsed"
                                                                    : "front filled the domain");
    }
    stats.mean_inside = sum_in / static_cast<double>(stats.count_inside);
    stats.mean_outside = sum_out / static_cast<double>(stats.count_outside);
    return stats;
}

double mean_curvature_term(const SignedDistanceField& f, const VoxelIndex& v) {
    const int i = v.i, j = v.j, k = v.k;
    const double c = f.at(i, j, k);

    const double px = (f.at(i + 1, j, k) - f.at(i - 1, j, k)) / 2.0;
    const double py = (f.at(i, j + 1, k) - f.at(i, j - 1, k)) / 2.0;
    const double pz = (f.at(i, j, k + 1) - f.at(i, j, k - 1)) / 2.0;

    const double pxx = f.at(i + 1, j, k) - 2.0 * c + f.at(i - 1, j, k);
    const double pyy = f.at(i, j + 1, k) - 2.0 * c + f.at(i, j - 1, k);
    const double pzz = f.at(i, j, k + 1) - 2.0 * c + f.at(i, j, k - 1);

    const double pxy = (f.at(i + 1, j + 1, k) + f.at(i - 1, j - 1, k) -
                        f.at(i + 1, j - 1, k) - f.at(i - 1, j + 1, k)) / 4.0;
    const double pxz = (f.at(i + 1, j, k + 1) + f.at(i - 1, j, k - 1) -
                        f.at(i + 1, j, k - 1) - f.at(i - 1, j, k + 1)) / 4.0;
    const double pyz = (f.at(i, j + 1, k + 1) + f.at(i, j - 1, k - 1) -
                        f.at(i, j + 1, k - 1) - f.at(i, j - 1, k + 1)) / 4.0;

    const double g2 = px * px + py * py + pz * pz;
    const double num = pxx * (py * py + pz * pz) + pyy * (px * px + pz * pz) +
                       pzz * (px * px + py * py) -
                       2.0 * (px * py * pxy + px * pz * pxz + py * pz * pyz);
    const double den = std::max(std::pow(g2, 1.5), kCurvatureEps);
    return std::clamp(num / den, -1.0, 1.0);
}

StepResult evolve_step(const Volume& volume, const SignedDistanceField& field,
                       const EvolutionParams& params, const RegionStats& stats) {
    validate(params);
    if (volume.dims != field.dims) {
        throw Error(ErrorCode::DimensionMismatch, "volume and field dims differ");
    }
    const Dims d = field.dims;

    StepResult result;
    result.field = field;
    result.field.band_width = params.band_width;

    for (int k = 1; k < d.nz - 1; ++k) {
        for (int j = 1; j < d.ny - 1; ++j) {
            for (int i = 1; i < d.nx - 1; ++i) {
                const std::size_t idx = d.index(i, j, k);
                const double phi = field.phi[idx];
                if (std::abs(phi) > params.band_width) continue;

                const double intensity = volume.data[idx];
                const double fit_in = intensity - stats.mean_inside;
                const double fit_out = intensity - stats.mean_outside;
                // Region terms follow the energy-descent direction for the
                // inside-negative sign convention; beta > 0 inflates.
                double force = -params.beta + params.gamma1 * fit_in * fit_in -
                               params.gamma2 * fit_out * fit_out;
                if (params.alpha != 0.0) {
                    force += params.alpha * mean_curvature_term(field, {i, j, k});
                }

                const double next = phi + params.dt * force;
                result.field.phi[idx] = next;
                result.max_update = std::max(result.max_update, std::abs(next - phi));
                result.sign_flips += (next <= 0.0) != (phi <= 0.0);
            }
        }
    }
    return result;
}

EvolveResult evolve(const Volume& volume, const SignedDistanceField& seed_field,
                    const EvolutionParams& params) {
    validate(params);

    EvolveResult result;
    result.field = seed_field;
    result.field.band_width = params.band_width;

    LabelMask last_rebuild_mask = field_to_mask(result.field);
    int calm_streak = 0;

    for (int iter = 1; iter <= params.max_iters; ++iter) {
        const RegionStats stats = region_stats(volume, result.field);
        StepResult step = evolve_step(volume, result.field, params, stats);
        result.field = std::move(step.field);
        result.iterations = iter;

        calm_streak = step.max_update < params.convergence_tol ? calm_streak + 1 : 0;
        if (calm_streak >= params.convergence_window) {
            result.converged = true;
            break;
        }

        const bool scheduled = iter % params.reinit_every == 0;
        if (scheduled || front_near_band_rim(result.field, params.band_width)) {
            LabelMask mask = field_to_mask(result.field);
            // Rebuilding from an unchanged mask would recreate the previous
            // field verbatim and cycle forever; keep sharpening instead.
            if (!(mask == last_rebuild_mask)) {
                result.field = rebuild_sdf(mask);
                result.field.band_width = params.band_width;
                last_rebuild_mask = std::move(mask);
            }
        }
    }

    // Surface a collapse that happened on the very last step.
    region_stats(volume, result.field);
    return result;
}

LabelMask field_to_mask(const SignedDistanceField& field) {
    LabelMask mask = make_mask(field.dims);
    for (std::size_t v = 0; v < field.phi.size(); ++v) {
        mask.in[v] = field.phi[v] <= 0.0 ? 1 : 0;
    }
    return mask;
}

} // namespace voxseg
