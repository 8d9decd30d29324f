#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "voxseg/levelset.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/phantom.hpp"
#include "voxseg/seeding.hpp"

using namespace voxseg;
using testsupport::thrown_code;

namespace {

SignedDistanceField plane_field(Dims dims, double offset) {
    SignedDistanceField f;
    f.dims = dims;
    f.phi.resize(dims.count());
    for (int k = 0; k < dims.nz; ++k)
        for (int j = 0; j < dims.ny; ++j)
            for (int i = 0; i < dims.nx; ++i) f.phi[dims.index(i, j, k)] = i - offset;
    return f;
}

Volume two_level_volume(const LabelMask& mask, float inside, float outside) {
    Volume v = make_volume(mask.dims, outside);
    for (std::size_t i = 0; i < mask.in.size(); ++i) {
        if (mask.in[i]) v.data[i] = inside;
    }
    return v;
}

} // namespace

TEST_CASE("parameter guard rejects unstable steps and accepts the defaults") {
    EvolutionParams params; // defaults
    CHECK_NOTHROW(validate(params));

    params.dt = 0.4; // 0.4 * (6*0.2 + 0 + 1 + 1) = 1.28
    CHECK(thrown_code([&] { validate(params); }) == ErrorCode::InvalidParams);

    params = {};
    params.dt = -0.1;
    CHECK(thrown_code([&] { validate(params); }) == ErrorCode::InvalidParams);
    params = {};
    params.convergence_window = 0;
    CHECK(thrown_code([&] { validate(params); }) == ErrorCode::InvalidParams);
}

TEST_CASE("region_stats computes exact means per sign set") {
    const Dims dims{16, 16, 16};
    const LabelMask ball = testsupport::ball_mask(dims, {8, 8, 8}, 4.0);
    const SignedDistanceField f = rebuild_sdf(ball);

    SUBCASE("binary volume matching the sign pattern") {
        const Volume v = two_level_volume(ball, 1.0f, 0.0f);
        const RegionStats stats = region_stats(v, f);
        CHECK(stats.mean_inside == doctest::Approx(1.0));
        CHECK(stats.mean_outside == doctest::Approx(0.0));
        CHECK(stats.count_inside == std::int64_t(ball.count_inside()));
        CHECK(stats.count_inside + stats.count_outside == std::int64_t(dims.count()));
    }

    SUBCASE("constant volume has equal means") {
        const Volume v = make_volume(dims, 0.5f);
        const RegionStats stats = region_stats(v, f);
        CHECK(stats.mean_inside == doctest::Approx(0.5));
        CHECK(stats.mean_outside == doctest::Approx(0.5));
    }

    SUBCASE("noisy phantom means stay near the true levels") {
        PhantomSpec spec;
        spec.dims = {32, 32, 32};
        spec.center = {16, 16, 16};
        spec.radius = 8.0;
        spec.noise_sigma = 0.1;
        spec.rng_seed = 99;
        const auto [volume, truth] = generate(spec);
        const RegionStats stats = region_stats(volume, rebuild_sdf(truth));
        CHECK(stats.mean_inside == doctest::Approx(0.8).epsilon(0.02));
        CHECK(stats.mean_outside == doctest::Approx(0.2).epsilon(0.02));
    }

    SUBCASE("an empty side is an error") {
        SignedDistanceField all_pos = f;
        for (double& p : all_pos.phi) p = 1.0;
        const Volume v = make_volume(dims, 0.5f);
        CHECK(thrown_code([&] { region_stats(v, all_pos); }) == ErrorCode::EmptyRegion);
    }
}

TEST_CASE("mean curvature of a plane is zero") {
    const SignedDistanceField f = plane_field({12, 12, 12}, 5.5);
    for (int k = 1; k < 11; ++k)
        for (int j = 1; j < 11; ++j)
            for (int i = 1; i < 11; ++i) CHECK(mean_curvature_term(f, {i, j, k}) == 0.0);
}

TEST_CASE("mean curvature on a sphere approximates 2/R") {
    const Dims dims{33, 33, 33};
    const SignedDistanceField f = testsupport::sphere_sdf(dims, {16, 16, 16}, 8.0);
    // voxels sitting on the surface along the axes and a diagonal
    const VoxelIndex probes[] = {{24, 16, 16}, {8, 16, 16}, {16, 24, 16}, {16, 16, 8}};
    for (const VoxelIndex& p : probes) {
        const double r = std::sqrt(double((p.i - 16) * (p.i - 16) + (p.j - 16) * (p.j - 16) +
                                          (p.k - 16) * (p.k - 16)));
        const double expected = 2.0 / r;
        const double kappa = mean_curvature_term(f, p);
        CHECK(kappa == doctest::Approx(expected).epsilon(0.2));
    }
}

TEST_CASE("mean curvature of a locally constant field is zero via the floor") {
    SignedDistanceField f;
    f.dims = {8, 8, 8};
    f.phi.assign(f.dims.count(), 2.5);
    CHECK(mean_curvature_term(f, {4, 4, 4}) == 0.0);
}

TEST_CASE("one region step never flips signs away from the interface") {
    const Dims dims{32, 32, 32};
    const LabelMask ball = testsupport::ball_mask(dims, {16, 16, 16}, 8.0);
    const Volume v = two_level_volume(ball, 1.0f, 0.0f);
    const SignedDistanceField f = rebuild_sdf(ball);

    EvolutionParams params;
    params.alpha = 0.0;
    params.beta = 0.0;
    params.gamma1 = params.gamma2 = 1.0;
    params.dt = 0.5;
    params.band_width = kInfiniteBand;

    const RegionStats stats = region_stats(v, f);
    CHECK(stats.mean_inside == doctest::Approx(1.0));
    CHECK(stats.mean_outside == doctest::Approx(0.0));

    const StepResult step = evolve_step(v, f, params, stats);
    CHECK(step.max_update <= params.dt + 1e-12);
    for (std::size_t i = 0; i < f.phi.size(); ++i) {
        if (std::abs(f.phi[i]) > 1.0) {
            CHECK((step.field.phi[i] <= 0.0) == (f.phi[i] <= 0.0));
        }
    }
}

TEST_CASE("pure curvature flow shrinks a sphere at rate 2a/R") {
    const Dims dims{33, 33, 33};
    SignedDistanceField f = testsupport::sphere_sdf(dims, {16, 16, 16}, 8.0);
    const Volume v = make_volume(dims, 0.5f);

    EvolutionParams params;
    params.alpha = 0.5;
    params.beta = params.gamma1 = params.gamma2 = 0.0;
    params.dt = 0.3;
    params.band_width = kInfiniteBand;

    const double r0 = testsupport::measured_radius(f, {16, 16, 16});
    CHECK(r0 == doctest::Approx(8.0).epsilon(0.02));

    const int steps = 20;
    for (int s = 0; s < steps; ++s) {
        f = evolve_step(v, f, params, region_stats(v, f)).field;
    }
    const double r1 = testsupport::measured_radius(f, {16, 16, 16});
    // dR/dt = -2a/R integrates to R(t) = sqrt(R0^2 - 4at)
    const double expected = std::sqrt(8.0 * 8.0 - 4.0 * params.alpha * steps * params.dt);
    const double measured_shrink = r0 - r1;
    const double expected_shrink = r0 - expected;
    CHECK(measured_shrink == doctest::Approx(expected_shrink).epsilon(0.25));
}

TEST_CASE("positive beta inflates the front by dt per step") {
    const Dims dims{48, 48, 48};
    SignedDistanceField f = testsupport::sphere_sdf(dims, {24, 24, 24}, 8.0);
    const Volume v = make_volume(dims, 0.5f);

    EvolutionParams params;
    params.alpha = params.gamma1 = params.gamma2 = 0.0;
    params.beta = 1.0;
    params.dt = 0.4;
    params.band_width = kInfiniteBand;

    std::size_t previous_inside = field_to_mask(f).count_inside();
    for (int s = 0; s < 10; ++s) {
        f = evolve_step(v, f, params, region_stats(v, f)).field;
        const std::size_t inside = field_to_mask(f).count_inside();
        CHECK(inside > previous_inside); // strictly grows until the band edge
        previous_inside = inside;
    }
    CHECK(testsupport::measured_radius(f, {24, 24, 24}) == doctest::Approx(12.0).epsilon(0.05));
}

TEST_CASE("field_to_mask uses the inclusive inside convention") {
    SignedDistanceField f;
    f.dims = {3, 1, 1};
    f.phi = {1.0, 0.0, -1.0};
    const LabelMask mask = field_to_mask(f);
    CHECK(!mask.at(0, 0, 0));
    CHECK(mask.at(1, 0, 0)); // phi == 0 counts as inside
    CHECK(mask.at(2, 0, 0));

    SignedDistanceField all_pos;
    all_pos.dims = {2, 2, 2};
    all_pos.phi.assign(8, 3.0);
    CHECK(field_to_mask(all_pos).count_inside() == 0);

    const LabelMask blob = testsupport::random_blob_mask({16, 16, 16}, 77);
    CHECK(field_to_mask(rebuild_sdf(blob)) == blob);
}

TEST_CASE("evolve is stationary on an interface-aligned binary phantom") {
    const Dims dims{32, 32, 32};
    const LabelMask truth = testsupport::ball_mask(dims, {16, 16, 16}, 8.0);
    const Volume v = two_level_volume(truth, 0.8f, 0.2f);

    EvolutionParams params;
    params.alpha = 0.0;
    params.beta = 0.0;
    params.gamma1 = params.gamma2 = 1.0;

    const EvolveResult result = evolve(v, rebuild_sdf(truth), params);
    CHECK(result.converged);
    CHECK(field_to_mask(result.field) == truth);
}

TEST_CASE("evolve pulls an offset seed onto the noisy sphere boundary") {
    PhantomSpec spec;
    spec.dims = {48, 48, 48};
    spec.center = {24, 24, 24};
    spec.radius = 8.0;
    spec.noise_sigma = 0.1;
    spec.rng_seed = 1234;
    const auto [volume, truth] = generate(spec);

    const LabelMask seed = testsupport::ball_mask(spec.dims, {24, 24, 24}, 6.0);
    EvolutionParams params;
    params.convergence_tol = 0.05;

    const EvolveResult result = evolve(volume, rebuild_sdf(seed), params);
    const AgreementReport agreement = compare(field_to_mask(result.field), truth);
    CHECK(agreement.dice >= 0.95);

    // determinism: a second run gives the bit-identical mask
    const EvolveResult again = evolve(volume, rebuild_sdf(seed), params);
    CHECK(field_to_mask(again.field) == field_to_mask(result.field));
}

TEST_CASE("narrow band and full-domain evolution agree on the final mask") {
    PhantomSpec spec;
    spec.dims = {48, 48, 48};
    spec.center = {24, 24, 24};
    spec.radius = 9.0;
    spec.noise_sigma = 0.1;
    spec.rng_seed = 4321;
    const auto [volume, truth] = generate(spec);
    const LabelMask seed = testsupport::ball_mask(spec.dims, {24, 24, 24}, 7.0);

    EvolutionParams banded;
    banded.convergence_tol = 0.05;
    banded.max_iters = 250;
    EvolutionParams full = banded;
    full.band_width = kInfiniteBand;

    const LabelMask banded_mask =
        field_to_mask(evolve(volume, rebuild_sdf(seed), banded).field);
    const LabelMask full_mask = field_to_mask(evolve(volume, rebuild_sdf(seed), full).field);
    CHECK(compare(banded_mask, full_mask).dice >= 0.99);
}

TEST_CASE("evolve reports collapse as EmptyRegion") {
    const Dims dims{16, 16, 16};
    LabelMask speck = make_mask(dims);
    speck.set(8, 8, 8, true);
    speck.set(9, 8, 8, true);
    const Volume v = make_volume(dims, 0.5f);

    EvolutionParams params;
    params.alpha = 0.0;
    params.beta = -1.0; // deflation
    params.gamma1 = params.gamma2 = 0.0;
    params.dt = 0.4;

    CHECK(thrown_code([&] { evolve(v, rebuild_sdf(speck), params); }) == ErrorCode::EmptyRegion);
}
