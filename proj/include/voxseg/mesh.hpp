#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "voxseg/distance_field.hpp"

namespace voxseg {

// Indexed triangle surface in voxel coordinates. Triangles wind
// counterclockwise seen from the positive-phi (outside) side.
struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
};

// Classic 256-case marching cubes over the zero level set, vertices linearly
// interpolated along cell edges and deduplicated by edge identity. The zero
// level set must exist and must not touch the domain border.
TriangleMesh marching_cubes(const SignedDistanceField& field);

} // namespace voxseg
