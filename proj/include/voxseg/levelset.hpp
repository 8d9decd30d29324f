#pragma once

#include <cstdint>
#include <limits>

#include "voxseg/distance_field.hpp"
#include "voxseg/volume.hpp"

namespace voxseg {

constexpr double kInfiniteBand = std::numeric_limits<double>::infinity();

struct EvolutionParams {
    double alpha = 0.2;  // curvature weight
    double beta = 0.0;   // constant inflation (>0) / deflation (<0) force
    double gamma1 = 1.0; // inside region weight
    double gamma2 = 1.0; // outside region weight
    double dt = 0.25;
    double band_width = 6.0;
    int reinit_every = 20;
    int max_iters = 500;
    double convergence_tol = 1e-3;
    int convergence_window = 5;
};

// Throws InvalidParams unless dt * (6*alpha + |beta| + gamma1 + gamma2) <= 1
// and the discretization controls are sane.
void validate(const EvolutionParams& params);

struct RegionStats {
    double mean_inside = 0.0;
    double mean_outside = 0.0;
    std::int64_t count_inside = 0;
    std::int64_t count_outside = 0;
};

// Exact means over {phi <= 0} and {phi > 0}, recomputed from scratch.
RegionStats region_stats(const Volume& volume, const SignedDistanceField& field);

// Divergence of the normalized gradient at an interior voxel, central
// differences, clamped to [-1, 1]. Callers must keep idx one voxel away from
// the domain border.
double mean_curvature_term(const SignedDistanceField& field, const VoxelIndex& idx);

struct StepResult {
    SignedDistanceField field;
    double max_update = 0.0;
    std::int64_t sign_flips = 0; // voxels that crossed zero this step
};

// One explicit time step over the narrow band {|phi| <= band_width},
// double-buffered. Voxels within one voxel of the border are frozen.
StepResult evolve_step(const Volume& volume, const SignedDistanceField& field,
                       const EvolutionParams& params, const RegionStats& stats);

struct EvolveResult {
    SignedDistanceField field;
    int iterations = 0;
    bool converged = false;
};

// Run the flow to equilibrium: stop when max_update stays below
// convergence_tol for convergence_window consecutive iterations, or when no
// voxel changes sign for a full reinit cadence (the region forces never
// vanish pointwise on noisy data, so a stationary front is the observable
// fixed point there), or at max_iters. The field is rebuilt by fast sweeping
// on the reinit cadence and whenever the front gets within two voxels of the
// band rim, skipped when the sign mask has not changed since the previous
// rebuild (an identical mask would rebuild the identical field).
EvolveResult evolve(const Volume& volume, const SignedDistanceField& seed_field,
                    const EvolutionParams& params);

LabelMask field_to_mask(const SignedDistanceField& field);

} // namespace voxseg
