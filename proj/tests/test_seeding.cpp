#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "voxseg/seeding.hpp"

using namespace voxseg;
using testsupport::thrown_code;
using testsupport::volume_from_values;

namespace {

// 500 voxels at 0.1, 300 at 0.5, 200 at 0.9, shuffled.
Volume three_spike_volume() {
    std::vector<float> values;
    values.insert(values.end(), 500, 0.1f);
    values.insert(values.end(), 300, 0.5f);
    values.insert(values.end(), 200, 0.9f);
    std::shuffle(values.begin(), values.end(), std::mt19937_64(3));
    return volume_from_values({10, 10, 10}, values);
}

Volume binary_volume() {
    std::vector<float> values(1000, 0.0f);
    std::fill(values.begin() + 500, values.end(), 1.0f);
    std::shuffle(values.begin(), values.end(), std::mt19937_64(5));
    return volume_from_values({10, 10, 10}, values);
}

// Exhaustive 1-D k-means oracle for k=3: tries every contiguous partition of
// the sorted values, scoring each cluster by L1 deviation from its mean.
struct OracleResult {
    double energy;
    std::array<double, 3> centroids;
};

OracleResult exhaustive_kmeans3(std::vector<float> values) {
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];

    auto segment_cost = [&](int lo, int hi, double& mean) { // [lo, hi)
        const int cnt = hi - lo;
        mean = (prefix[hi] - prefix[lo]) / cnt;
        // L1 deviation from the mean via the split where values cross it
        const int m = static_cast<int>(std::upper_bound(values.begin() + lo, values.begin() + hi,
                                                        static_cast<float>(mean)) -
                                       values.begin());
        const double below = mean * (m - lo) - (prefix[m] - prefix[lo]);
        const double above = (prefix[hi] - prefix[m]) - mean * (hi - m);
        return below + above;
    };

    OracleResult best{std::numeric_limits<double>::max(), {}};
    for (int s1 = 1; s1 < n - 1; ++s1) {
        for (int s2 = s1 + 1; s2 < n; ++s2) {
            double m0, m1, m2;
            const double cost =
                segment_cost(0, s1, m0) + segment_cost(s1, s2, m1) + segment_cost(s2, n, m2);
            if (cost < best.energy) best = {cost, {m0, m1, m2}};
        }
    }
    return best;
}

} // namespace

TEST_CASE("estimate_k finds the intensity modes") {
    CHECK(estimate_k(three_spike_volume()) == 3);
    CHECK(estimate_k(binary_volume()) == 2);
    CHECK(thrown_code([] { estimate_k(make_volume({4, 4, 4}, 0.5f)); }) ==
          ErrorCode::DegenerateVolume);
}

TEST_CASE("kmeans on exact two-value data gives a perfect split") {
    const Volume v = binary_volume();
    const ClusterModel model = kmeans_cluster(v, 2);
    CHECK(model.centroids[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.centroids[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.energy == doctest::Approx(0.0));
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        CHECK(model.assignment[i] == (v.data[i] > 0.5f ? 1 : 0));
    }
}

TEST_CASE("kmeans recovers the three spikes exactly") {
    const Volume v = three_spike_volume();
    const ClusterModel model = kmeans_cluster(v, 3);

    const OracleResult oracle = exhaustive_kmeans3(v.data);
    CHECK(oracle.energy == doctest::Approx(0.0));
    for (int j = 0; j < 3; ++j) {
        CHECK(model.centroids[j] == doctest::Approx(oracle.centroids[j]).epsilon(1e-9));
    }
    CHECK(model.energy <= oracle.energy + 1e-9);
}

TEST_CASE("kmeans rejects k below 2") {
    CHECK(thrown_code([] { kmeans_cluster(make_volume({2, 2, 2}, 0.5f), 1); }) ==
          ErrorCode::InvalidParams);
}

TEST_CASE("kmeans reports EmptyClusterCollapse when reseeding cannot help") {
    CHECK(thrown_code([] { kmeans_cluster(make_volume({4, 4, 4}, 0.25f), 2); }) ==
          ErrorCode::EmptyClusterCollapse);
}

TEST_CASE("kmeans objective is non-increasing across iterations") {
    std::mt19937_64 rng(17);
    std::normal_distribution<float> a(0.3f, 0.07f), b(0.7f, 0.05f);
    std::vector<float> values;
    for (int i = 0; i < 1500; ++i) values.push_back(std::clamp(a(rng), 0.0f, 1.0f));
    for (int i = 0; i < 500; ++i) values.push_back(std::clamp(b(rng), 0.0f, 1.0f));
    const Volume v = volume_from_values({20, 10, 10}, values);

    for (int k : {2, 3, 4}) {
        const ClusterModel model = kmeans_cluster(v, k);
        REQUIRE(model.energy_history.size() >= 2);
        for (std::size_t i = 1; i < model.energy_history.size(); ++i) {
            CHECK(model.energy_history[i] <= model.energy_history[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("select_seed_cluster keeps exactly the cluster containing x0") {
    const Volume v = binary_volume();
    const ClusterModel model = kmeans_cluster(v, 2);

    // find one bright and one dark voxel
    VoxelIndex bright{}, dark{};
    for (int k = 0; k < 10; ++k) {
        for (int j = 0; j < 10; ++j) {
            for (int i = 0; i < 10; ++i) {
                (v.at(i, j, k) > 0.5f ? bright : dark) = {i, j, k};
            }
        }
    }

    const LabelMask on_bright = select_seed_cluster(model, bright);
    const LabelMask on_dark = select_seed_cluster(model, dark);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        CHECK(on_bright.in[i] == (v.data[i] > 0.5f ? 1 : 0));
        CHECK(on_dark.in[i] == (v.data[i] > 0.5f ? 0 : 1));
    }
}

TEST_CASE("select_seed_cluster picks the middle spike") {
    const Volume v = three_spike_volume();
    const ClusterModel model = kmeans_cluster(v, 3);
    VoxelIndex middle{};
    for (int k = 0; k < 10; ++k) {
        for (int j = 0; j < 10; ++j) {
            for (int i = 0; i < 10; ++i) {
                if (v.at(i, j, k) == 0.5f) middle = {i, j, k};
            }
        }
    }
    const LabelMask mask = select_seed_cluster(model, middle);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        CHECK(mask.in[i] == (v.data[i] == 0.5f ? 1 : 0));
    }
}

TEST_CASE("erode peels faces and matches the L1 distance oracle") {
    // steps = 0 is the identity
    const LabelMask blob = testsupport::random_blob_mask({24, 24, 24}, 101);
    CHECK(erode(blob, 0) == blob);

    // solid 5x5x5 cube -> solid 3x3x3 cube
    LabelMask cube = make_mask({9, 9, 9});
    for (int k = 2; k <= 6; ++k)
        for (int j = 2; j <= 6; ++j)
            for (int i = 2; i <= 6; ++i) cube.set(i, j, k, true);
    const LabelMask eroded = erode(cube, 1);
    CHECK(eroded.count_inside() == 27);
    for (int k = 3; k <= 5; ++k)
        for (int j = 3; j <= 5; ++j)
            for (int i = 3; i <= 5; ++i) CHECK(eroded.at(i, j, k));

    // voxelwise equality with {distance to complement > steps}
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const LabelMask mask = testsupport::random_blob_mask({24, 24, 24}, seed);
        const std::vector<int> dist = testsupport::l1_distance_to_complement(mask);
        for (int steps : {1, 2, 3}) {
            const LabelMask result = erode(mask, steps);
            for (std::size_t v = 0; v < result.in.size(); ++v) {
                CHECK(result.in[v] == (dist[v] > steps ? 1 : 0));
            }
        }
    }
}

TEST_CASE("dilate grows a cross and matches the L1 distance oracle") {
    const LabelMask blob = testsupport::random_blob_mask({24, 24, 24}, 102);
    CHECK(dilate(blob, 0) == blob);

    LabelMask single = make_mask({5, 5, 5});
    single.set(2, 2, 2, true);
    const LabelMask grown = dilate(single, 1);
    CHECK(grown.count_inside() == 7);
    CHECK(grown.at(2, 2, 2));
    CHECK(grown.at(1, 2, 2));
    CHECK(grown.at(3, 2, 2));
    CHECK(grown.at(2, 1, 2));
    CHECK(grown.at(2, 3, 2));
    CHECK(grown.at(2, 2, 1));
    CHECK(grown.at(2, 2, 3));

    for (std::uint64_t seed : {21u, 22u}) {
        const LabelMask mask = testsupport::random_blob_mask({24, 24, 24}, seed);
        const std::vector<int> dist = testsupport::l1_distance_to_mask(mask);
        for (int steps : {1, 2, 3}) {
            const LabelMask result = dilate(mask, steps);
            for (std::size_t v = 0; v < result.in.size(); ++v) {
                CHECK(result.in[v] == (dist[v] <= steps ? 1 : 0));
            }
        }
    }
}

TEST_CASE("opening shrinks and closing restores away from the border") {
    const Dims dims{24, 24, 24};
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        const LabelMask mask = testsupport::random_blob_mask(dims, seed);
        for (int steps : {1, 2}) {
            const LabelMask opened = dilate(erode(mask, steps), steps);
            for (std::size_t v = 0; v < mask.in.size(); ++v) {
                if (opened.in[v]) CHECK(mask.in[v]); // opening is anti-extensive
            }
            const LabelMask closed = erode(dilate(mask, steps), steps);
            for (int k = steps; k < dims.nz - steps; ++k) {
                for (int j = steps; j < dims.ny - steps; ++j) {
                    for (int i = steps; i < dims.nx - steps; ++i) {
                        if (mask.at(i, j, k)) CHECK(closed.at(i, j, k));
                    }
                }
            }
        }
    }
}

TEST_CASE("erode then dilate of an interior cube matches the composed oracles") {
    LabelMask cube = make_mask({12, 12, 12});
    for (int k = 3; k <= 8; ++k)
        for (int j = 3; j <= 8; ++j)
            for (int i = 3; i <= 8; ++i) cube.set(i, j, k, true);

    const LabelMask opened = dilate(erode(cube, 1), 1);

    // oracle composition: erode = {L1 dist to complement > 1}, then
    // dilate = {L1 dist to that result <= 1}
    LabelMask eroded_oracle = make_mask(cube.dims);
    const std::vector<int> to_complement = testsupport::l1_distance_to_complement(cube);
    for (std::size_t v = 0; v < cube.in.size(); ++v) {
        eroded_oracle.in[v] = to_complement[v] > 1 ? 1 : 0;
    }
    const std::vector<int> to_eroded = testsupport::l1_distance_to_mask(eroded_oracle);
    for (std::size_t v = 0; v < cube.in.size(); ++v) {
        CHECK(opened.in[v] == (to_eroded[v] <= 1 ? 1 : 0));
        if (opened.in[v]) CHECK(cube.in[v]); // still anti-extensive
    }
    // the cross element cannot rebuild the cube's edges and corners, but
    // every face-interior voxel comes back
    CHECK(!opened.at(3, 3, 3));
    CHECK(opened.at(5, 5, 3));
    CHECK(opened.at(5, 5, 8));
}

TEST_CASE("connected_component keeps only the blob reachable from x0") {
    const Dims dims{20, 20, 20};
    LabelMask mask = make_mask(dims);
    // cube A
    for (int k = 2; k <= 5; ++k)
        for (int j = 2; j <= 5; ++j)
            for (int i = 2; i <= 5; ++i) mask.set(i, j, k, true);
    // cube B, disjoint
    for (int k = 12; k <= 15; ++k)
        for (int j = 12; j <= 15; ++j)
            for (int i = 12; i <= 15; ++i) mask.set(i, j, k, true);

    const LabelMask only_a = connected_component(mask, {3, 3, 3});
    CHECK(only_a.count_inside() == 64);
    CHECK(only_a.at(3, 3, 3));
    CHECK(!only_a.at(13, 13, 13));

    // a single connected blob floods back to itself
    const LabelMask blob = testsupport::ball_mask(dims, {10, 10, 10}, 5.0);
    CHECK(connected_component(blob, {10, 10, 10}) == blob);

    CHECK(thrown_code([&] { connected_component(mask, {0, 0, 0}); }) == ErrorCode::SeedNotInMask);
}

TEST_CASE("connected_component follows a one-voxel bridge") {
    LabelMask mask = make_mask({30, 10, 10});
    for (int k = 2; k <= 5; ++k)
        for (int j = 2; j <= 5; ++j)
            for (int i = 2; i <= 5; ++i) mask.set(i, j, k, true);
    for (int k = 2; k <= 5; ++k)
        for (int j = 2; j <= 5; ++j)
            for (int i = 20; i <= 23; ++i) mask.set(i, j, k, true);
    for (int i = 6; i < 20; ++i) mask.set(i, 3, 3, true); // bridge

    const LabelMask from_a = connected_component(mask, {3, 3, 3});
    const LabelMask from_b = connected_component(mask, {21, 3, 3});
    CHECK(from_a == mask);
    CHECK(from_b == mask);
}

TEST_CASE("generate_seed recovers a clean sphere within a one-voxel shell") {
    const Dims dims{32, 32, 32};
    const LabelMask truth = testsupport::ball_mask(dims, {16, 16, 16}, 8.0);
    Volume volume = make_volume(dims, 0.2f);
    for (std::size_t v = 0; v < truth.in.size(); ++v) {
        if (truth.in[v]) volume.data[v] = 0.8f;
    }

    SeedParams params;
    params.k = 2;
    params.erosion_steps = 1;
    const LabelMask seed = generate_seed(volume, {16, 16, 16}, params);

    CHECK(seed.at(16, 16, 16));
    const LabelMask inner = erode(truth, 1);
    const LabelMask outer = dilate(truth, 1);
    for (std::size_t v = 0; v < seed.in.size(); ++v) {
        if (inner.in[v]) CHECK(seed.in[v]);
        if (seed.in[v]) CHECK(outer.in[v]);
    }
    // identical inputs give bit-identical seeds
    CHECK(generate_seed(volume, {16, 16, 16}, params) == seed);
}

TEST_CASE("generate_seed drops structures disconnected from x0") {
    const Dims dims{32, 32, 32};
    Volume volume = make_volume(dims, 0.2f);
    const LabelMask ball = testsupport::ball_mask(dims, {10, 10, 10}, 5.0);
    for (std::size_t v = 0; v < ball.in.size(); ++v) {
        if (ball.in[v]) volume.data[v] = 0.8f;
    }
    for (int k = 22; k <= 27; ++k)
        for (int j = 22; j <= 27; ++j)
            for (int i = 22; i <= 27; ++i) volume.at(i, j, k) = 0.8f;

    SeedParams params;
    params.k = 2;
    params.erosion_steps = 1;
    const LabelMask seed = generate_seed(volume, {10, 10, 10}, params);
    for (int k = 21; k <= 28 && k < dims.nz; ++k) {
        for (int j = 21; j <= 28; ++j) {
            for (int i = 21; i <= 28; ++i) {
                CHECK(!seed.at(i, j, k));
            }
        }
    }
}

TEST_CASE("generate_seed with x0 in the background selects the background cluster") {
    const Dims dims{32, 32, 32};
    const LabelMask ball = testsupport::ball_mask(dims, {16, 16, 16}, 8.0);
    Volume volume = make_volume(dims, 0.2f);
    for (std::size_t v = 0; v < ball.in.size(); ++v) {
        if (ball.in[v]) volume.data[v] = 0.8f;
    }
    SeedParams params;
    params.k = 2;
    params.erosion_steps = 1;
    const LabelMask seed = generate_seed(volume, {2, 2, 2}, params);
    CHECK(seed.at(2, 2, 2));
    CHECK(!seed.at(16, 16, 16)); // the bright structure is not part of it
}

TEST_CASE("generate_seed reports the erosion step that removed x0") {
    const Dims dims{24, 24, 24};
    const LabelMask ball = testsupport::ball_mask(dims, {12, 12, 12}, 1.4);
    Volume volume = make_volume(dims, 0.2f);
    for (std::size_t v = 0; v < ball.in.size(); ++v) {
        if (ball.in[v]) volume.data[v] = 0.8f;
    }
    SeedParams params;
    params.k = 2;
    params.erosion_steps = 3;
    CHECK(thrown_code([&] { generate_seed(volume, {12, 12, 12}, params); }) ==
          ErrorCode::SeedEroded);
}

TEST_CASE("auto erosion steps scale with the smallest dimension") {
    SeedParams params;
    CHECK(params.resolve_erosion_steps({32, 64, 64}) == 1);
    CHECK(params.resolve_erosion_steps({64, 64, 64}) == 1);
    CHECK(params.resolve_erosion_steps({256, 256, 256}) == 4);
    CHECK(params.resolve_erosion_steps({96, 256, 256}) == 2);
    params.erosion_steps = 7;
    CHECK(params.resolve_erosion_steps({64, 64, 64}) == 7);
}
