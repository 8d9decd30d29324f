#include "voxseg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace voxseg {

namespace {

using json = nlohmann::json;

std::size_t dtype_size(const std::string& dtype) {
    if (dtype == "u8") return 1;
    if (dtype == "u16") return 2;
    if (dtype == "f32") return 4;
    throw Error(ErrorCode::UnknownDtype, "dtype must be u8, u16 or f32, got '" + dtype + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Write-temp-then-rename so partially written artifacts never appear under
// the final name.
void atomic_write(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + tmp + " for writing");
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "rename to " + path + " failed: " + ec.message());
}

std::string raw_payload(const std::string& path, const VolumeHeader& header) {
    const std::string payload = read_file(path);
    const std::size_t expected = header.dims.count() * dtype_size(header.dtype);
    if (payload.size() != expected) {
        throw Error(ErrorCode::HeaderPayloadMismatch,
                    path + " holds " + std::to_string(payload.size()) + " bytes, header declares " +
                        std::to_string(expected));
    }
    return payload;
}

} // namespace

VolumeHeader read_header(const std::string& header_path) {
    json j;
    try {
        j = json::parse(read_file(header_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, header_path + ": " + e.what());
    }
    try {
        VolumeHeader h;
        const auto dims = j.at("dims");
        if (!dims.is_array() || dims.size() != 3) {
            throw Error(ErrorCode::MalformedHeader, header_path + ": dims must have 3 entries");
        }
        h.dims = {dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>()};
        if (h.dims.nx <= 0 || h.dims.ny <= 0 || h.dims.nz <= 0) {
            throw Error(ErrorCode::MalformedHeader, header_path + ": dims must be positive");
        }
        const auto spacing = j.at("spacing");
        h.spacing = {spacing.at(0).get<double>(), spacing.at(1).get<double>(),
                     spacing.at(2).get<double>()};
        if (h.spacing.sx <= 0.0 || h.spacing.sy <= 0.0 || h.spacing.sz <= 0.0) {
            throw Error(ErrorCode::MalformedHeader, header_path + ": spacing must be positive");
        }
        h.dtype = j.at("dtype").get<std::string>();
        dtype_size(h.dtype);
        if (j.at("byteOrder").get<std::string>() != "little") {
            throw Error(ErrorCode::MalformedHeader, header_path + ": byteOrder must be 'little'");
        }
        return h;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedHeader, header_path + ": " + e.what());
    }
}

void write_header(const VolumeHeader& header, const std::string& header_path) {
    json j;
    j["dims"] = json::array({header.dims.nx, header.dims.ny, header.dims.nz});
    j["spacing"] = json::array({header.spacing.sx, header.spacing.sy, header.spacing.sz});
    j["dtype"] = header.dtype;
    j["byteOrder"] = "little";
    atomic_write(header_path, j.dump(2) + "\n");
}

std::string derive_header_path(const std::string& raw_path) {
    if (raw_path.size() > 4 && raw_path.ends_with(".raw")) {
        return raw_path.substr(0, raw_path.size() - 4) + ".json";
    }
    return raw_path + ".json";
}

Volume read_volume(const std::string& raw_path, const std::string& header_path) {
    const VolumeHeader header = read_header(header_path);
    const std::string payload = raw_payload(raw_path, header);

    Volume volume = make_volume(header.dims, 0.0f, header.spacing);
    const std::size_t n = header.dims.count();
    if (header.dtype == "u8") {
        for (std::size_t v = 0; v < n; ++v) {
            volume.data[v] = static_cast<float>(static_cast<unsigned char>(payload[v]) / 255.0);
        }
    } else if (header.dtype == "u16") {
        for (std::size_t v = 0; v < n; ++v) {
            std::uint16_t raw;
            std::memcpy(&raw, payload.data() + 2 * v, 2);
            volume.data[v] = static_cast<float>(raw / 65535.0);
        }
    } else {
        std::memcpy(volume.data.data(), payload.data(), 4 * n);
    }
    return volume;
}

void write_volume(const Volume& volume, const std::string& raw_path) {
    std::string payload(volume.data.size() * 4, '\0');
    std::memcpy(payload.data(), volume.data.data(), payload.size());
    atomic_write(raw_path, payload);

    VolumeHeader header;
    header.dims = volume.dims;
    header.spacing = volume.spacing;
    header.dtype = "f32";
    write_header(header, derive_header_path(raw_path));
}

LabelMask read_mask(const std::string& raw_path, const std::string& header_path) {
    const VolumeHeader header = read_header(header_path);
    if (header.dtype != "u8") {
        throw Error(ErrorCode::MalformedMask, raw_path + ": mask dtype must be u8");
    }
    const std::string payload = raw_payload(raw_path, header);

    LabelMask mask = make_mask(header.dims);
    for (std::size_t v = 0; v < payload.size(); ++v) {
        const auto byte = static_cast<unsigned char>(payload[v]);
        if (byte > 1) {
            throw Error(ErrorCode::MalformedMask,
                        raw_path + ": byte value " + std::to_string(byte) + " (only 0/1 allowed)");
        }
        mask.in[v] = byte;
    }
    return mask;
}

void write_mask(const LabelMask& mask, const std::string& raw_path) {
    std::string payload(mask.in.size(), '\0');
    for (std::size_t v = 0; v < mask.in.size(); ++v) payload[v] = static_cast<char>(mask.in[v]);
    atomic_write(raw_path, payload);

    VolumeHeader header;
    header.dims = mask.dims;
    header.dtype = "u8";
    write_header(header, derive_header_path(raw_path));
}

void write_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ostringstream out;
    out << "# vertices: " << mesh.vertices.size() << " triangles: " << mesh.triangles.size()
        << "\n";
    char line[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(line, sizeof line, "v %.6f %.6f %.6f\n", v[0], v[1], v[2]);
        out << line;
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    }
    atomic_write(path, out.str());
}

void export_slice(const Volume& volume, const LabelMask* mask, char axis, int index,
                  const std::string& path) {
    if (mask && !(mask->dims == volume.dims)) {
        throw Error(ErrorCode::DimensionMismatch, "mask dims differ from volume dims");
    }
    const Dims d = volume.dims;

    int width = 0, height = 0;
    if (axis == 'x') {
        width = d.ny;
        height = d.nz;
        if (index < 0 || index >= d.nx) throw Error(ErrorCode::IndexOutOfRange, "x slice index");
    } else if (axis == 'y') {
        width = d.nx;
        height = d.nz;
        if (index < 0 || index >= d.ny) throw Error(ErrorCode::IndexOutOfRange, "y slice index");
    } else if (axis == 'z') {
        width = d.nx;
        height = d.ny;
        if (index < 0 || index >= d.nz) throw Error(ErrorCode::IndexOutOfRange, "z slice index");
    } else {
        throw Error(ErrorCode::InvalidParams, "axis must be x, y or z");
    }

    auto voxel = [&](int u, int v) -> VoxelIndex {
        if (axis == 'x') return {index, u, v};
        if (axis == 'y') return {u, index, v};
        return {u, v, index};
    };

    std::ostringstream out;
    out << "P6\n" << width << " " << height << "\n255\n";
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const VoxelIndex vx = voxel(u, v);
            const double value = std::clamp(static_cast<double>(volume.at(vx)), 0.0, 1.0);
            const auto gray = static_cast<unsigned char>(std::lround(value * 255.0));
            unsigned char rgb[3] = {gray, gray, gray};
            if (mask && mask->at(vx)) {
                rgb[0] = static_cast<unsigned char>(gray / 2);
                rgb[1] = static_cast<unsigned char>(gray / 2);
                rgb[2] = 255;
            }
            out.write(reinterpret_cast<const char*>(rgb), 3);
        }
    }
    atomic_write(path, out.str());
}

std::string agreement_to_json(const AgreementReport& report) {
    json j;
    j["dice"] = report.dice;
    j["overlap"] = report.overlap;
    j["volume_a"] = report.volume_a;
    j["volume_b"] = report.volume_b;
    j["intersection"] = report.intersection;
    return j.dump(2);
}

namespace {

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int parsed = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedConfig, "bad integer for " + key + ": '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedConfig, "bad number for " + key + ": '" + value + "'");
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig config;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto hash = raw_line.find('#');
        if (hash != std::string::npos) raw_line.erase(hash);
        const std::string line = trim(raw_line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::MalformedConfig,
                        "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw Error(ErrorCode::MalformedConfig,
                        "line " + std::to_string(line_no) + ": empty key or value");
        }

        if (key == "k") {
            if (value == "auto") {
                config.seed.k.reset();
            } else {
                config.seed.k = parse_int(key, value);
                if (*config.seed.k < 2) {
                    throw Error(ErrorCode::InvalidParams, "k must be at least 2");
                }
            }
        } else if (key == "erosionSteps") {
            if (value == "auto") {
                config.seed.erosion_steps.reset();
            } else {
                config.seed.erosion_steps = parse_int(key, value);
                if (*config.seed.erosion_steps < 0) {
                    throw Error(ErrorCode::InvalidParams, "erosionSteps must be non-negative");
                }
            }
        } else if (key == "alpha") {
            config.evolution.alpha = parse_real(key, value);
        } else if (key == "beta") {
            config.evolution.beta = parse_real(key, value);
        } else if (key == "gamma1") {
            config.evolution.gamma1 = parse_real(key, value);
        } else if (key == "gamma2") {
            config.evolution.gamma2 = parse_real(key, value);
        } else if (key == "dt") {
            config.evolution.dt = parse_real(key, value);
        } else if (key == "bandWidth") {
            config.evolution.band_width =
                value == "inf" ? kInfiniteBand : parse_real(key, value);
        } else if (key == "reinitEvery") {
            config.evolution.reinit_every = parse_int(key, value);
        } else if (key == "maxIters") {
            config.evolution.max_iters = parse_int(key, value);
        } else if (key == "convergenceTol") {
            config.evolution.convergence_tol = parse_real(key, value);
        } else if (key == "convergenceWindow") {
            config.evolution.convergence_window = parse_int(key, value);
        } else {
            throw Error(ErrorCode::MalformedConfig,
                        "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    validate(config.evolution);
    return config;
}

PipelineConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

} // namespace voxseg
