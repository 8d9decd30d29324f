#include "voxseg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "voxseg/distance_field.hpp"
#include "voxseg/levelset.hpp"
#include "voxseg/mesh.hpp"
#include "voxseg/seeding.hpp"

namespace voxseg {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

json config_to_json(const PipelineConfig& config) {
    json j;
    j["k"] = config.seed.k ? json(*config.seed.k) : json("auto");
    j["erosionSteps"] =
        config.seed.erosion_steps ? json(*config.seed.erosion_steps) : json("auto");
    j["alpha"] = config.evolution.alpha;
    j["beta"] = config.evolution.beta;
    j["gamma1"] = config.evolution.gamma1;
    j["gamma2"] = config.evolution.gamma2;
    j["dt"] = config.evolution.dt;
    j["bandWidth"] = std::isfinite(config.evolution.band_width)
                         ? json(config.evolution.band_width)
                         : json("inf");
    j["reinitEvery"] = config.evolution.reinit_every;
    j["maxIters"] = config.evolution.max_iters;
    j["convergenceTol"] = config.evolution.convergence_tol;
    j["convergenceWindow"] = config.evolution.convergence_window;
    return j;
}

json agreement_json(const AgreementReport& a) {
    json j;
    j["dice"] = a.dice;
    j["overlap"] = a.overlap;
    j["volume_a"] = a.volume_a;
    j["volume_b"] = a.volume_b;
    j["intersection"] = a.intersection;
    return j;
}

json report_json(const RunReport& r) {
    json j;
    j["label"] = r.label;
    j["seed_point"] = json::array({r.seed_point.i, r.seed_point.j, r.seed_point.k});
    j["params"] = config_to_json(r.config);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["timings"] = {{"seeding", r.timings.seeding},
                    {"distance_init", r.timings.distance_init},
                    {"evolution", r.timings.evolution},
                    {"meshing", r.timings.meshing}};
    j["final_volume_voxels"] = r.final_volume_voxels;
    if (r.agreement) j["agreement"] = agreement_json(*r.agreement);
    return j;
}

// Radius-3 sphere membership around the click point: the generic seed used
// by the baseline method in the benchmark.
LabelMask sphere_seed(const Dims& dims, const VoxelIndex& x0, double radius) {
    LabelMask mask = make_mask(dims);
    const int r = static_cast<int>(std::ceil(radius));
    for (int k = std::max(0, x0.k - r); k <= std::min(dims.nz - 1, x0.k + r); ++k) {
        for (int j = std::max(0, x0.j - r); j <= std::min(dims.ny - 1, x0.j + r); ++j) {
            for (int i = std::max(0, x0.i - r); i <= std::min(dims.nx - 1, x0.i + r); ++i) {
                const double di = i - x0.i, dj = j - x0.j, dk = k - x0.k;
                if (std::sqrt(di * di + dj * dj + dk * dk) <= radius) mask.set(i, j, k, true);
            }
        }
    }
    return mask;
}

} // namespace

std::string run_report_to_json(const RunReport& report) { return report_json(report).dump(2); }

RunReport run_segment(const SegmentOptions& options) {
    const Volume raw = read_volume(options.volume_path, options.header_path);
    if (!raw.dims.contains(options.seed_point.i, options.seed_point.j, options.seed_point.k)) {
        throw Error(ErrorCode::IndexOutOfRange, "seed point outside volume");
    }
    PipelineConfig config;
    if (options.config_path) config = load_config(*options.config_path);
    validate(config.evolution);

    RunReport report;
    report.label = options.label;
    report.seed_point = options.seed_point;
    report.config = config;

    auto t = Clock::now();
    const Volume volume = normalize(raw);
    const LabelMask seed = generate_seed(volume, options.seed_point, config.seed);
    report.timings.seeding = seconds_since(t);

    t = Clock::now();
    const SignedDistanceField seed_field = rebuild_sdf(seed);
    report.timings.distance_init = seconds_since(t);

    t = Clock::now();
    const EvolveResult evolved = evolve(volume, seed_field, config.evolution);
    report.timings.evolution = seconds_since(t);
    report.iterations = evolved.iterations;
    report.converged = evolved.converged;

    t = Clock::now();
    const LabelMask mask = field_to_mask(evolved.field);
    const TriangleMesh mesh = marching_cubes(evolved.field);
    report.timings.meshing = seconds_since(t);
    report.final_volume_voxels = mask.count_inside();

    if (options.truth_path) {
        const LabelMask truth =
            read_mask(*options.truth_path, derive_header_path(*options.truth_path));
        report.agreement = compare(mask, truth);
    }

    write_mask(mask, options.out_prefix + "_mask.raw");
    write_mesh(mesh, options.out_prefix + "_mesh.obj");

    std::ofstream out(options.out_prefix + "_report.json", std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write report");
    out << run_report_to_json(report) << "\n";
    return report;
}

BenchReport run_bench(const BenchOptions& options) {
    const PhantomSpec spec = load_phantom_spec(options.spec_path);
    PipelineConfig config;
    if (options.config_path) config = load_config(*options.config_path);
    validate(config.evolution);

    const auto [raw, truth] = generate(spec);
    const Volume volume = normalize(raw);
    const VoxelIndex x0 = options.seed_point ? *options.seed_point : spec.interior_point();
    if (!volume.dims.contains(x0.i, x0.j, x0.k)) {
        throw Error(ErrorCode::IndexOutOfRange, "seed point outside volume");
    }

    auto run_method = [&](const std::string& name, const LabelMask& seed) {
        BenchMethodResult result;
        result.method = name;
        const SignedDistanceField field = rebuild_sdf(seed);
        const auto t = Clock::now();
        const EvolveResult evolved = evolve(volume, field, config.evolution);
        result.evolution_seconds = seconds_since(t);
        result.iterations = evolved.iterations;
        result.converged = evolved.converged;
        result.agreement = compare(field_to_mask(evolved.field), truth);
        return result;
    };

    BenchReport report;
    report.cluster_seed = run_method("cluster-seed", generate_seed(volume, x0, config.seed));
    report.sphere_seed = run_method("sphere-seed", sphere_seed(volume.dims, x0, 3.0));
    report.iteration_ratio = report.sphere_seed.iterations > 0
                                 ? static_cast<double>(report.cluster_seed.iterations) /
                                       static_cast<double>(report.sphere_seed.iterations)
                                 : 0.0;

    if (!options.out_path.empty()) {
        std::ofstream out(options.out_path, std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + options.out_path);
        out << bench_report_to_json(report) << "\n";
    }
    return report;
}

std::string bench_report_to_json(const BenchReport& report) {
    auto method_json = [](const BenchMethodResult& m) {
        json j;
        j["method"] = m.method;
        j["iterations"] = m.iterations;
        j["converged"] = m.converged;
        j["evolution_seconds"] = m.evolution_seconds;
        j["agreement"] = agreement_json(m.agreement);
        return j;
    };
    json j;
    j["methods"] = json::array({method_json(report.cluster_seed), method_json(report.sphere_seed)});
    j["iteration_ratio"] = report.iteration_ratio;
    return j.dump(2);
}

std::string bench_report_to_text(const BenchReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %10s %10s %8s %8s %12s\n", "method", "iters",
                  "converged", "dice", "overlap", "evolve[s]");
    out << line;
    for (const BenchMethodResult* m : {&report.cluster_seed, &report.sphere_seed}) {
        std::snprintf(line, sizeof line, "%-14s %10d %10s %8.4f %8.4f %12.3f\n",
                      m->method.c_str(), m->iterations, m->converged ? "yes" : "no",
                      m->agreement.dice, m->agreement.overlap, m->evolution_seconds);
        out << line;
    }
    std::snprintf(line, sizeof line, "iteration ratio (cluster/sphere): %.3f\n",
                  report.iteration_ratio);
    out << line;
    return out.str();
}

} // namespace voxseg
