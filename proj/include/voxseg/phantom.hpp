#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "voxseg/volume.hpp"

namespace voxseg {

enum class PhantomShape { Sphere, TwoBlobsBridged, BentTube };

// Synthetic volume description with analytically known ground truth. Noise is
// a pure function of (rngSeed, voxel index), so generation is bit-stable.
struct PhantomSpec {
    PhantomShape shape = PhantomShape::Sphere;
    Dims dims{64, 64, 64};
    double inside_intensity = 0.8;
    double outside_intensity = 0.2;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;

    // sphere
    std::array<double, 3> center{32, 32, 32};
    double radius = 8.0;

    // two-blobs-bridged
    std::array<std::array<double, 3>, 2> blob_centers{{{0, 0, 0}, {0, 0, 0}}};
    std::array<double, 2> blob_radii{0, 0};
    double bridge_width = 0.0;

    // bent-tube: quadratic Bezier centerline through three control points
    std::array<std::array<double, 3>, 3> tube_control_points{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
    double tube_radius = 0.0;

    // Nominal point inside the shape, used as the default click location.
    VoxelIndex interior_point() const;
};

std::pair<Volume, LabelMask> generate(const PhantomSpec& spec);

PhantomSpec parse_phantom_spec(const std::string& json_text);
PhantomSpec load_phantom_spec(const std::string& path);
std::string phantom_spec_to_json(const PhantomSpec& spec);

} // namespace voxseg
