#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "voxseg/volume.hpp"

using namespace voxseg;
using testsupport::volume_from_values;

TEST_CASE("percentile uses nearest-rank-low on the sorted values") {
    // 100 voxels valued 0..99, shuffled
    std::vector<float> values(100);
    std::iota(values.begin(), values.end(), 0.0f);
    std::shuffle(values.begin(), values.end(), std::mt19937_64(7));
    const Volume v = volume_from_values({10, 10, 1}, values);

    CHECK(percentile(v, 50.0) == doctest::Approx(49.0)); // floor(0.5 * 99) = 49
    CHECK(percentile(v, 0.0) == doctest::Approx(0.0));
    CHECK(percentile(v, 100.0) == doctest::Approx(99.0));
}

TEST_CASE("percentile of a constant volume is that constant") {
    const Volume v = make_volume({4, 4, 4}, 3.0f);
    for (double p : {0.0, 17.0, 50.0, 99.0, 100.0}) {
        CHECK(percentile(v, p) == doctest::Approx(3.0));
    }
}

TEST_CASE("percentile 0 of a two-voxel volume is the minimum") {
    const Volume v = volume_from_values({2, 1, 1}, {0.0f, 10.0f});
    CHECK(percentile(v, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("normalize maps the 2nd/98th percentiles to 0 and 1") {
    // 1000 voxels spanning 0..999; lo = sorted[19] = 19, hi = sorted[979] = 979
    std::vector<float> values(1000);
    std::iota(values.begin(), values.end(), 0.0f);
    std::shuffle(values.begin(), values.end(), std::mt19937_64(11));
    const Volume v = volume_from_values({10, 10, 10}, values);

    const double lo = percentile(v, 2.0);
    const double hi = percentile(v, 98.0);
    CHECK(lo == doctest::Approx(19.0));
    CHECK(hi == doctest::Approx(979.0));

    const Volume n = normalize(v);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == float(lo)) CHECK(n.data[i] == doctest::Approx(0.0));
        if (values[i] == float(hi)) CHECK(n.data[i] == doctest::Approx(1.0));
        if (values[i] == float((lo + hi) / 2)) CHECK(n.data[i] == doctest::Approx(0.5));
    }
    for (float x : n.data) {
        CHECK(x >= 0.0f);
        CHECK(x <= 1.0f);
    }
}

TEST_CASE("normalize maps a flat volume to all zeros") {
    const Volume v = make_volume({3, 3, 3}, 7.5f);
    const Volume n = normalize(v);
    for (float x : n.data) CHECK(x == 0.0f);
}

TEST_CASE("normalize leaves a saturated binary volume unchanged") {
    // 2nd percentile is 0 and 98th is 1, so the map is the identity + clamp
    std::vector<float> values(200, 0.0f);
    std::fill(values.begin() + 100, values.end(), 1.0f);
    const Volume v = volume_from_values({200, 1, 1}, values);
    const Volume n = normalize(v);
    CHECK(n.data == v.data);
}

TEST_CASE("normalize rejects non-finite input") {
    std::vector<float> values(8, 0.5f);
    values[3] = std::numeric_limits<float>::quiet_NaN();
    const Volume v = volume_from_values({2, 2, 2}, values);
    CHECK(testsupport::thrown_code([&] { normalize(v); }) == ErrorCode::NonFiniteInput);
}

TEST_CASE("normalize is idempotent when the percentile anchors are 0 and 1") {
    std::vector<float> values;
    for (int i = 0; i < 50; ++i) values.push_back(0.0f);
    for (int i = 0; i < 900; ++i) values.push_back(0.5f);
    for (int i = 0; i < 50; ++i) values.push_back(1.0f);
    const Volume v = volume_from_values({10, 10, 10}, values);
    const Volume once = normalize(v);
    const Volume twice = normalize(once);
    CHECK(once.data == twice.data);
}

TEST_CASE("normalize preserves intensity ordering") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<float> dist(-5.0f, 12.0f);
    std::vector<float> values(512);
    for (float& x : values) x = dist(rng);
    const Volume v = volume_from_values({8, 8, 8}, values);
    const Volume n = normalize(v);
    for (std::size_t a = 0; a < values.size(); a += 7) {
        for (std::size_t b = 0; b < values.size(); b += 13) {
            if (values[a] <= values[b]) CHECK(n.data[a] <= n.data[b]);
        }
    }
}

TEST_CASE("neighbors handles corners, faces and both connectivities") {
    const Dims dims{4, 4, 4};
    CHECK(neighbors({0, 0, 0}, Connectivity::Six, dims).size() == 3);
    CHECK(neighbors({1, 1, 1}, Connectivity::Six, dims).size() == 6);
    CHECK(neighbors({1, 1, 1}, Connectivity::TwentySix, dims).size() == 26);
    CHECK(neighbors({0, 0, 0}, Connectivity::TwentySix, dims).size() == 7);

    // fixed face order first
    const auto n6 = neighbors({1, 1, 1}, Connectivity::Six, dims);
    CHECK(n6[0] == VoxelIndex{0, 1, 1});
    CHECK(n6[1] == VoxelIndex{2, 1, 1});
    CHECK(n6[2] == VoxelIndex{1, 0, 1});
    CHECK(n6[3] == VoxelIndex{1, 2, 1});
    CHECK(n6[4] == VoxelIndex{1, 1, 0});
    CHECK(n6[5] == VoxelIndex{1, 1, 2});
}

TEST_CASE("neighbor relation is symmetric") {
    const Dims dims{3, 4, 5};
    for (Connectivity conn : {Connectivity::Six, Connectivity::TwentySix}) {
        for (int k = 0; k < dims.nz; ++k) {
            for (int j = 0; j < dims.ny; ++j) {
                for (int i = 0; i < dims.nx; ++i) {
                    const VoxelIndex a{i, j, k};
                    for (const VoxelIndex& b : neighbors(a, conn, dims)) {
                        const auto back = neighbors(b, conn, dims);
                        CHECK(std::find(back.begin(), back.end(), a) != back.end());
                    }
                }
            }
        }
    }
}
