#include "voxseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace voxseg {

namespace {

using json = nlohmann::json;
using Vec3 = std::array<double, 3>;

constexpr int kTubeSamples = 128;
constexpr double kMargin = 3.0;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in (0,1), a pure function of seed and voxel index.
double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(index));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Acklam's rational approximation of the inverse normal CDF. Pure
// arithmetic, so noise stays bit-identical across libm versions.
double inverse_normal_cdf(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                     2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double dist(const Vec3& p, const Vec3& q) {
    const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Vec3 ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
    const double len2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    double t = len2 > 0.0 ? (ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2]) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec3 q{a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
    return dist(p, q);
}

Vec3 bezier(const std::array<Vec3, 3>& cp, double t) {
    const double u = 1.0 - t;
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        out[c] = u * u * cp[0][c] + 2.0 * u * t * cp[1][c] + t * t * cp[2][c];
    }
    return out;
}

std::vector<Vec3> tube_centerline(const PhantomSpec& spec) {
    std::vector<Vec3> pts;
    pts.reserve(kTubeSamples + 1);
    for (int s = 0; s <= kTubeSamples; ++s) {
        pts.push_back(bezier(spec.tube_control_points, double(s) / kTubeSamples));
    }
    return pts;
}

void require_ball_margin(const Dims& d, const Vec3& c, double r) {
    const double lo[3] = {c[0] - r - kMargin, c[1] - r - kMargin, c[2] - r - kMargin};
    const double hi[3] = {c[0] + r + kMargin, c[1] + r + kMargin, c[2] + r + kMargin};
    const int n[3] = {d.nx, d.ny, d.nz};
    for (int axis = 0; axis < 3; ++axis) {
        if (lo[axis] < 0.0 || hi[axis] > n[axis] - 1) {
            throw Error(ErrorCode::GeometryOutOfBounds,
                        "shape must keep a 3-voxel margin inside the domain");
        }
    }
}

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw Error(ErrorCode::MalformedHeader, "expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

VoxelIndex PhantomSpec::interior_point() const {
    Vec3 p{};
    switch (shape) {
        case PhantomShape::Sphere: p = center; break;
        case PhantomShape::TwoBlobsBridged: p = blob_centers[0]; break;
        case PhantomShape::BentTube: p = bezier(tube_control_points, 0.5); break;
    }
    return {static_cast<int>(std::lround(p[0])), static_cast<int>(std::lround(p[1])),
            static_cast<int>(std::lround(p[2]))};
}

std::pair<Volume, LabelMask> generate(const PhantomSpec& spec) {
    if (spec.inside_intensity == spec.outside_intensity) {
        throw Error(ErrorCode::InvalidParams, "insideIntensity must differ from outsideIntensity");
    }
    if (spec.noise_sigma < 0.0) {
        throw Error(ErrorCode::InvalidParams, "noiseSigma must be non-negative");
    }
    const Dims d = spec.dims;
    if (d.nx <= 0 || d.ny <= 0 || d.nz <= 0) {
        throw Error(ErrorCode::InvalidParams, "dims must be positive");
    }

    std::vector<Vec3> centerline;
    switch (spec.shape) {
        case PhantomShape::Sphere:
            require_ball_margin(d, spec.center, spec.radius);
            break;
        case PhantomShape::TwoBlobsBridged:
            require_ball_margin(d, spec.blob_centers[0], spec.blob_radii[0]);
            require_ball_margin(d, spec.blob_centers[1], spec.blob_radii[1]);
            require_ball_margin(d, spec.blob_centers[0], spec.bridge_width / 2.0);
            require_ball_margin(d, spec.blob_centers[1], spec.bridge_width / 2.0);
            break;
        case PhantomShape::BentTube:
            centerline = tube_centerline(spec);
            for (const Vec3& p : centerline) require_ball_margin(d, p, spec.tube_radius);
            break;
    }

    auto is_inside = [&](int i, int j, int k) {
        const Vec3 p{double(i), double(j), double(k)};
        switch (spec.shape) {
            case PhantomShape::Sphere:
                return dist(p, spec.center) <= spec.radius;
            case PhantomShape::TwoBlobsBridged: {
                if (dist(p, spec.blob_centers[0]) <= spec.blob_radii[0]) return true;
                if (dist(p, spec.blob_centers[1]) <= spec.blob_radii[1]) return true;
                return point_segment_distance(p, spec.blob_centers[0], spec.blob_centers[1]) <=
                       spec.bridge_width / 2.0;
            }
            case PhantomShape::BentTube: {
                for (std::size_t s = 0; s + 1 < centerline.size(); ++s) {
                    if (point_segment_distance(p, centerline[s], centerline[s + 1]) <=
                        spec.tube_radius) {
                        return true;
                    }
                }
                return false;
            }
        }
        return false;
    };

    Volume volume = make_volume(d);
    LabelMask mask = make_mask(d);
    for (int k = 0; k < d.nz; ++k) {
        for (int j = 0; j < d.ny; ++j) {
            for (int i = 0; i < d.nx; ++i) {
                const std::size_t idx = d.index(i, j, k);
                const bool inside = is_inside(i, j, k);
                mask.in[idx] = inside ? 1 : 0;
                double value = inside ? spec.inside_intensity : spec.outside_intensity;
                if (spec.noise_sigma > 0.0) {
                    const double u = counter_uniform(spec.rng_seed, idx);
                    value += spec.noise_sigma * inverse_normal_cdf(u);
                }
                volume.data[idx] = static_cast<float>(std::clamp(value, 0.0, 1.0));
            }
        }
    }
    return {std::move(volume), std::move(mask)};
}

PhantomSpec parse_phantom_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, std::string("phantom spec: ") + e.what());
    }
    try {
        PhantomSpec spec;
        const std::string shape = j.at("shape").get<std::string>();
        if (shape == "sphere") {
            spec.shape = PhantomShape::Sphere;
        } else if (shape == "two-blobs-bridged") {
            spec.shape = PhantomShape::TwoBlobsBridged;
        } else if (shape == "bent-tube") {
            spec.shape = PhantomShape::BentTube;
        } else {
            throw Error(ErrorCode::MalformedHeader, "unknown phantom shape: " + shape);
        }
        const auto dims = j.at("dims");
        spec.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
        spec.inside_intensity = j.at("insideIntensity").get<double>();
        spec.outside_intensity = j.at("outsideIntensity").get<double>();
        spec.noise_sigma = j.value("noiseSigma", 0.0);
        spec.rng_seed = j.value("rngSeed", std::uint64_t{0});

        switch (spec.shape) {
            case PhantomShape::Sphere:
                spec.center = vec3_from_json(j.at("center"));
                spec.radius = j.at("radius").get<double>();
                break;
            case PhantomShape::TwoBlobsBridged:
                spec.blob_centers[0] = vec3_from_json(j.at("blobCenters").at(0));
                spec.blob_centers[1] = vec3_from_json(j.at("blobCenters").at(1));
                spec.blob_radii[0] = j.at("blobRadii").at(0).get<double>();
                spec.blob_radii[1] = j.at("blobRadii").at(1).get<double>();
                spec.bridge_width = j.at("bridgeWidth").get<double>();
                break;
            case PhantomShape::BentTube:
                for (int c = 0; c < 3; ++c) {
                    spec.tube_control_points[c] = vec3_from_json(j.at("tubeControlPoints").at(c));
                }
                spec.tube_radius = j.at("tubeRadius").get<double>();
                break;
        }
        return spec;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, std::string("phantom spec: ") + e.what());
    }
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_phantom_spec(buf.str());
}

std::string phantom_spec_to_json(const PhantomSpec& spec) {
    json j;
    switch (spec.shape) {
        case PhantomShape::Sphere: j["shape"] = "sphere"; break;
        case PhantomShape::TwoBlobsBridged: j["shape"] = "two-blobs-bridged"; break;
        case PhantomShape::BentTube: j["shape"] = "bent-tube"; break;
    }
    j["dims"] = json::array({spec.dims.nx, spec.dims.ny, spec.dims.nz});
    j["insideIntensity"] = spec.inside_intensity;
    j["outsideIntensity"] = spec.outside_intensity;
    j["noiseSigma"] = spec.noise_sigma;
    j["rngSeed"] = spec.rng_seed;
    switch (spec.shape) {
        case PhantomShape::Sphere:
            j["center"] = vec3_to_json(spec.center);
            j["radius"] = spec.radius;
            break;
        case PhantomShape::TwoBlobsBridged:
            j["blobCenters"] = json::array(
                {vec3_to_json(spec.blob_centers[0]), vec3_to_json(spec.blob_centers[1])});
            j["blobRadii"] = json::array({spec.blob_radii[0], spec.blob_radii[1]});
            j["bridgeWidth"] = spec.bridge_width;
            break;
        case PhantomShape::BentTube:
            j["tubeControlPoints"] = json::array({vec3_to_json(spec.tube_control_points[0]),
                                                  vec3_to_json(spec.tube_control_points[1]),
                                                  vec3_to_json(spec.tube_control_points[2])});
            j["tubeRadius"] = spec.tube_radius;
            break;
    }
    return j.dump(2);
}

} // namespace voxseg
