#pragma once

#include <optional>
#include <string>

#include "voxseg/levelset.hpp"
#include "voxseg/mesh.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/seeding.hpp"
#include "voxseg/volume.hpp"

namespace voxseg {

// JSON sidecar describing a raw little-endian payload.
struct VolumeHeader {
    Dims dims;
    Spacing spacing;
    std::string dtype = "f32"; // u8 | u16 | f32
};

VolumeHeader read_header(const std::string& header_path);
void write_header(const VolumeHeader& header, const std::string& header_path);

// Convention used by the CLI: x.raw pairs with x.json.
std::string derive_header_path(const std::string& raw_path);

// Integer payloads are scaled to [0,1] by their max representable value; f32
// is taken as-is.
Volume read_volume(const std::string& raw_path, const std::string& header_path);
// Always writes f32 plus the sidecar header.
void write_volume(const Volume& volume, const std::string& raw_path);

LabelMask read_mask(const std::string& raw_path, const std::string& header_path);
void write_mask(const LabelMask& mask, const std::string& raw_path);

// ASCII OBJ, positions with 6 decimal places, 1-based face indices.
void write_mesh(const TriangleMesh& mesh, const std::string& path);

// Binary PPM (P6) of one slice: grayscale intensity, mask voxels tinted blue
// (blue channel 255, red/green halved).
void export_slice(const Volume& volume, const LabelMask* mask, char axis, int index,
                  const std::string& path);

std::string agreement_to_json(const AgreementReport& report);

// Flat `key = value` config covering SeedParams and EvolutionParams fields;
// unknown keys are rejected.
struct PipelineConfig {
    SeedParams seed;
    EvolutionParams evolution;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

} // namespace voxseg
