#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxseg/io.hpp"
#include "voxseg/phantom.hpp"
#include "voxseg/pipeline.hpp"

namespace {

voxseg::VoxelIndex parse_seed_point(const std::string& text) {
    int coords[3];
    char extra;
    if (std::sscanf(text.c_str(), "%d,%d,%d%c", &coords[0], &coords[1], &coords[2], &extra) != 3) {
        throw voxseg::Error(voxseg::ErrorCode::InvalidParams,
                            "seed must be 'i,j,k', got '" + text + "'");
    }
    return {coords[0], coords[1], coords[2]};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D volumetric segmentation: cluster seeding + narrow-band level set"};
    app.require_subcommand(1);

    // segment
    std::string volume_path, header_path, seed_text, out_prefix, label = "structure";
    std::string config_path, truth_path;
    auto* segment = app.add_subcommand("segment", "segment a structure around a seed point");
    segment->add_option("--volume", volume_path, "raw volume payload")->required();
    segment->add_option("--header", header_path, "JSON header sidecar")->required();
    segment->add_option("--seed", seed_text, "seed voxel as i,j,k")->required();
    segment->add_option("--config", config_path, "key = value parameter file");
    segment->add_option("--out-prefix", out_prefix, "prefix for mask/mesh/report outputs")
        ->required();
    segment->add_option("--truth", truth_path, "ground-truth mask for agreement scoring");
    segment->add_option("--label", label, "structure label for the report");

    // phantom
    std::string phantom_spec_path, phantom_prefix;
    auto* phantom = app.add_subcommand("phantom", "generate a synthetic volume + ground truth");
    phantom->add_option("--spec", phantom_spec_path, "phantom spec JSON")->required();
    phantom->add_option("--out-prefix", phantom_prefix, "prefix for volume/truth outputs")
        ->required();

    // compare
    std::string mask_a, mask_b;
    auto* cmp = app.add_subcommand("compare", "dice/overlap agreement between two masks");
    cmp->add_option("--a", mask_a, "first mask (raw, header derived)")->required();
    cmp->add_option("--b", mask_b, "second mask (raw, header derived)")->required();

    // slices
    std::string slice_volume, slice_mask, slice_out;
    std::string axis = "z";
    int slice_index = 0;
    auto* slices = app.add_subcommand("slices", "export one slice as a PPM image");
    slices->add_option("--volume", slice_volume, "raw volume (header derived)")->required();
    slices->add_option("--mask", slice_mask, "overlay mask (raw, header derived)");
    slices->add_option("--axis", axis, "slice axis: x, y or z")->required();
    slices->add_option("--index", slice_index, "slice index along the axis")->required();
    slices->add_option("--out", slice_out, "output PPM path")->required();

    // bench
    std::string bench_spec, bench_config, bench_out, bench_seed;
    auto* bench = app.add_subcommand("bench", "cluster seeding vs generic sphere seeding");
    bench->add_option("--spec", bench_spec, "phantom spec JSON")->required();
    bench->add_option("--config", bench_config, "key = value parameter file");
    bench->add_option("--out", bench_out, "JSON report path")->required();
    bench->add_option("--seed", bench_seed, "seed voxel as i,j,k (default: shape interior)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (segment->parsed()) {
            voxseg::SegmentOptions options;
            options.volume_path = volume_path;
            options.header_path = header_path;
            options.seed_point = parse_seed_point(seed_text);
            if (!config_path.empty()) options.config_path = config_path;
            options.out_prefix = out_prefix;
            if (!truth_path.empty()) options.truth_path = truth_path;
            options.label = label;

            const voxseg::RunReport report = voxseg::run_segment(options);
            if (!report.converged) {
                std::cerr << "warning: NonConverged after " << report.iterations
                          << " iterations\n";
            }
            std::cout << voxseg::run_report_to_json(report) << "\n";
        } else if (phantom->parsed()) {
            const voxseg::PhantomSpec spec = voxseg::load_phantom_spec(phantom_spec_path);
            const auto [volume, truth] = voxseg::generate(spec);
            voxseg::write_volume(volume, phantom_prefix + "_volume.raw");
            voxseg::write_mask(truth, phantom_prefix + "_truth.raw");
            std::cout << "volume: " << phantom_prefix + "_volume.raw" << "\n"
                      << "truth:  " << phantom_prefix + "_truth.raw" << "\n";
        } else if (cmp->parsed()) {
            const voxseg::LabelMask a =
                voxseg::read_mask(mask_a, voxseg::derive_header_path(mask_a));
            const voxseg::LabelMask b =
                voxseg::read_mask(mask_b, voxseg::derive_header_path(mask_b));
            std::cout << voxseg::agreement_to_json(voxseg::compare(a, b)) << "\n";
        } else if (slices->parsed()) {
            const voxseg::Volume volume =
                voxseg::read_volume(slice_volume, voxseg::derive_header_path(slice_volume));
            voxseg::LabelMask mask;
            const bool with_mask = !slice_mask.empty();
            if (with_mask) {
                mask = voxseg::read_mask(slice_mask, voxseg::derive_header_path(slice_mask));
            }
            if (axis.size() != 1) {
                throw voxseg::Error(voxseg::ErrorCode::InvalidParams, "axis must be x, y or z");
            }
            voxseg::export_slice(volume, with_mask ? &mask : nullptr, axis[0], slice_index,
                                 slice_out);
        } else if (bench->parsed()) {
            voxseg::BenchOptions options;
            options.spec_path = bench_spec;
            if (!bench_config.empty()) options.config_path = bench_config;
            options.out_path = bench_out;
            if (!bench_seed.empty()) options.seed_point = parse_seed_point(bench_seed);

            const voxseg::BenchReport report = voxseg::run_bench(options);
            std::cout << voxseg::bench_report_to_text(report);
        }
    } catch (const voxseg::Error& e) {
        nlohmann::json j;
        j["error"] = voxseg::error_name(e.code());
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::json j;
        j["error"] = "IoFailure";
        j["message"] = e.what();
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return 0;
}
