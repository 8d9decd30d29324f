#include "voxseg/mesh.hpp"

#include <cstdint>
#include <unordered_map>

#include "mc_tables.hpp"

namespace voxseg {

namespace {

// Corner layout matching the lookup tables: 0..3 on the k face, 4..7 on k+1.
constexpr int kCornerOffset[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

constexpr int kEdgeCorner[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

} // namespace

TriangleMesh marching_cubes(const SignedDistanceField& field) {
    const Dims d = field.dims;

    bool any_inside = false, any_outside = false;
    for (double p : field.phi) {
        (p <= 0.0 ? any_inside : any_outside) = true;
        if (any_inside && any_outside) break;
    }
    if (!any_inside || !any_outside) {
        throw Error(ErrorCode::NoZeroCrossing, "field has no sign change");
    }

    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                const bool border = i == 0 || i == d.nx - 1 || j == 0 || j == d.ny - 1 ||
                                    k == 0 || k == d.nz - 1;
                if (border && field.at(i, j, k) <= 0.0) {
                    throw Error(ErrorCode::SurfaceTouchesBorder,
                                "zero level set reaches the domain border");
                }
            }
        }
    }

    TriangleMesh mesh;
    // Canonical edge id: 3 * (linear index of the lower corner) + axis.
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

    auto vertex_on_edge = [&](int ci, int cj, int ck, int ai, int aj, int ak) {
        const std::size_t la = d.index(ci, cj, ck);
        const std::size_t lb = d.index(ai, aj, ak);
        const bool a_first = la < lb;
        const std::size_t lmin = a_first ? la : lb;
        const int axis = ai != ci ? 0 : (aj != cj ? 1 : 2);
        const std::uint64_t key = static_cast<std::uint64_t>(lmin) * 3 + axis;

        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;

        const double va = field.phi[la];
        const double vb = field.phi[lb];
        const double t = va / (va - vb); // zero of the linear interpolant
        const std::array<double, 3> pos{
            ci + t * (ai - ci),
            cj + t * (aj - cj),
            ck + t * (ak - ck),
        };
        const auto id = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(pos);
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int k = 0; k + 1 < d.nz; ++k) {
        for (int j = 0; j + 1 < d.ny; ++j) {
            for (int i = 0; i + 1 < d.nx; ++i) {
                int cube_index = 0;
                double vals[8];
                for (int c = 0; c < 8; ++c) {
                    vals[c] = field.at(i + kCornerOffset[c][0], j + kCornerOffset[c][1],
                                       k + kCornerOffset[c][2]);
                    if (vals[c] <= 0.0) cube_index |= 1 << c;
                }
                if (mc::kEdgeTable[cube_index] == 0) continue;

                std::uint32_t edge_ids[12] = {};
                for (int e = 0; e < 12; ++e) {
                    if (!(mc::kEdgeTable[cube_index] & (1 << e))) continue;
                    const int* ca = kCornerOffset[kEdgeCorner[e][0]];
                    const int* cb = kCornerOffset[kEdgeCorner[e][1]];
                    edge_ids[e] = vertex_on_edge(i + ca[0], j + ca[1], k + ca[2],
                                                 i + cb[0], j + cb[1], k + cb[2]);
                }

                // The tables are built for inside = below the isolevel with the
                // opposite handedness; swapping two vertices orients every
                // triangle counterclockwise as seen from positive phi.
                const int* tri = mc::kTriTable[cube_index];
                for (int t = 0; tri[t] != -1; t += 3) {
                    mesh.triangles.push_back(
                        {edge_ids[tri[t]], edge_ids[tri[t + 2]], edge_ids[tri[t + 1]]});
                }
            }
        }
    }
    return mesh;
}

} // namespace voxseg
