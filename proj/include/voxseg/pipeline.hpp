#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxseg/io.hpp"
#include "voxseg/metrics.hpp"
#include "voxseg/phantom.hpp"

namespace voxseg {

struct PhaseTimings {
    double seeding = 0.0;
    double distance_init = 0.0;
    double evolution = 0.0;
    double meshing = 0.0;
};

struct RunReport {
    std::string label;
    VoxelIndex seed_point;
    PipelineConfig config;
    int iterations = 0;
    bool converged = false;
    PhaseTimings timings;
    std::uint64_t final_volume_voxels = 0;
    std::optional<AgreementReport> agreement;
};

std::string run_report_to_json(const RunReport& report);

struct SegmentOptions {
    std::string volume_path;
    std::string header_path;
    VoxelIndex seed_point;
    std::optional<std::string> config_path;
    std::string out_prefix;
    std::optional<std::string> truth_path; // mask raw; header derived
    std::string label = "structure";
};

// normalize -> generate_seed -> rebuild_sdf -> evolve -> mask + mesh.
// Writes <prefix>_mask.raw/.json, <prefix>_mesh.obj, <prefix>_report.json.
RunReport run_segment(const SegmentOptions& options);

struct BenchOptions {
    std::string spec_path;
    std::optional<std::string> config_path;
    std::string out_path;
    std::optional<VoxelIndex> seed_point; // default: phantom interior point
};

struct BenchMethodResult {
    std::string method;
    int iterations = 0;
    bool converged = false;
    double evolution_seconds = 0.0;
    AgreementReport agreement;
};

struct BenchReport {
    BenchMethodResult cluster_seed;
    BenchMethodResult sphere_seed;
    double iteration_ratio = 0.0; // cluster iterations / sphere iterations
};

// Method A seeds with the clustering pipeline, method B with a radius-3
// sphere at the same point; everything downstream is identical.
BenchReport run_bench(const BenchOptions& options);

std::string bench_report_to_json(const BenchReport& report);
std::string bench_report_to_text(const BenchReport& report);

} // namespace voxseg
