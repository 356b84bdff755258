#include "blockreg/io.h"
#include "blockreg/metrics.h"
#include "blockreg/optimizer.h"
#include "blockreg/phantom.h"
#include "blockreg/volume_ops.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace blockreg;

int3 parse_dims(const std::string& text) {
    int3 d;
    if (std::sscanf(text.c_str(), "%dx%dx%d", &d.x, &d.y, &d.z) == 3) return d;
    int n = 0;
    if (std::sscanf(text.c_str(), "%d", &n) == 1) return {n, n, n};
    throw CLI::ValidationError("dims", "expected N or NXxNYxNZ");
}

double3 parse_vec3(const std::string& text) {
    double3 v;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) == 3) return v;
    throw CLI::ValidationError("vector", "expected x,y,z");
}

io::InputRecord record_volume(const std::string& path, const Volume& vol) {
    return {path, io::hash_hex(io::fnv1a64(vol.data(), vol.size() * 4)), vol.dims(),
            vol.channels()};
}

io::InputRecord record_field(const std::string& path, const DisplacementField& field) {
    return {path, io::hash_hex(io::fnv1a64(field.data(), field.size() * 4)), field.dims(), 3};
}

void print_level(const LevelReport& lr) {
    std::printf("level %d (%dx%dx%d): energy %.6g -> %.6g, sweeps %d, moves %ld, "
                "evaluated %ld, skipped %ld, %.2fs%s\n",
                lr.level, lr.dims.x, lr.dims.y, lr.dims.z, lr.initial_energy, lr.final_energy,
                lr.sweeps, lr.moves_accepted, lr.blocks_evaluated, lr.blocks_skipped, lr.seconds,
                lr.converged ? "" : " (max sweeps reached)");
}

struct RegisterArgs {
    std::string source;
    std::string target;
    std::string out_field;
    std::string out_warped;
    std::string init_field;
    std::string manifest;
    RegistrationConfig config;
    bool no_early_termination = false;
    bool direct = false;
};

int run_register(const RegisterArgs& args) {
    RegistrationConfig config = args.config;
    config.early_termination = !args.no_early_termination;
    config.validate();

    Volume source = io::read_volume(args.source);
    Volume target = io::read_volume(args.target);

    std::optional<DisplacementField> init;
    if (!args.init_field.empty()) init = io::read_field(args.init_field);

    std::vector<io::InputRecord> inputs{record_volume(args.source, source),
                                        record_volume(args.target, target)};
    if (init) inputs.push_back(record_field(args.init_field, *init));

    OptimizerHooks hooks;
    DisplacementField field;
    RunReport report = register_pair(target, source, field, config, hooks,
                                     init ? &*init : nullptr, args.direct);
    for (const LevelReport& lr : report.levels) print_level(lr);

    io::write_field(args.out_field, field);
    std::vector<io::InputRecord> outputs{record_field(args.out_field, field)};

    if (!args.out_warped.empty()) {
        Volume warped = warp(source, field);
        io::write_volume(args.out_warped, warped);
        outputs.push_back(record_volume(args.out_warped, warped));
    }

    if (!args.manifest.empty()) {
        std::string mode = args.direct ? "direct"
                          : config.block_size == 1 ? "icm-equivalent"
                                                   : "blocked";
        nlohmann::json j = io::run_manifest(config, report, mode, inputs, outputs);
        io::write_text(args.manifest, j.dump(2) + "\n");
    }
    std::printf("final energy %.17g\n", report.final_energy);
    return 0;
}

struct EvalArgs {
    std::string forward_field;
    std::string reverse_field;
    bool want_vme = false;
    std::string volume_a;
    std::string volume_b;
    std::string checkerboard_out;
    int tile = 16;
    int axis = 2;
    int slice = -1;
    int channel = 0;
};

int run_eval(const EvalArgs& args) {
    if (args.want_vme) {
        if (args.forward_field.empty() || args.reverse_field.empty()) {
            throw std::runtime_error("--vme requires --forward-field and --reverse-field");
        }
        DisplacementField fwd = io::read_field(args.forward_field);
        DisplacementField rev = io::read_field(args.reverse_field);
        std::printf("%.17g\n", vme(fwd, rev));
        return 0;
    }
    if (!args.checkerboard_out.empty()) {
        if (args.volume_a.empty() || args.volume_b.empty()) {
            throw std::runtime_error("--checkerboard requires --volume-a and --volume-b");
        }
        Volume a = io::read_volume(args.volume_a);
        Volume b = io::read_volume(args.volume_b);
        int slice = args.slice;
        if (slice < 0) {
            int extent = args.axis == 0 ? a.dims().x : args.axis == 1 ? a.dims().y : a.dims().z;
            slice = extent / 2;
        }
        RgbImage img = checkerboard(a, b, args.tile, args.axis, slice, args.channel);
        io::write_ppm(args.checkerboard_out, img);
        return 0;
    }
    throw std::runtime_error("eval: nothing to do (use --vme or --checkerboard)");
}

struct BenchArgs {
    std::vector<int> block_sizes;
    int repeats = 1;
    std::string phantom_kind = "two-channel-blob";
    std::string dims = "32";
    uint64_t seed = 1;
    bool direct = false;
    std::string out_csv;
    RegistrationConfig config;
};

int run_bench(const BenchArgs& args) {
    PhantomSpec spec;
    spec.kind = phantom_kind_from_string(args.phantom_kind);
    spec.dims = parse_dims(args.dims);
    spec.seed = args.seed;
    PhantomResult phantom = make_phantom(spec);

    std::string csv = "block_size,time_s,energy,vme\n";
    auto run_one = [&](const std::string& label, bool direct, int block_size) {
        RegistrationConfig config = args.config;
        config.block_size = block_size;
        DisplacementField fwd, rev;
        RunReport fr = register_pair(phantom.target, phantom.source, fwd, config, {}, nullptr,
                                     direct);
        RunReport rr = register_pair(phantom.source, phantom.target, rev, config, {}, nullptr,
                                     direct);
        double pair_vme = vme(fwd, rev);
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%.6f,%.17g,%.17g\n", label.c_str(),
                      fr.total_seconds + rr.total_seconds, fr.final_energy, pair_vme);
        csv += line;
        std::fputs(line, stdout);
    };

    std::fputs("block_size,time_s,energy,vme\n", stdout);
    for (int r = 0; r < args.repeats; ++r) {
        for (int n : args.block_sizes) {
            run_one(std::to_string(n), false, n);
        }
        if (args.direct) run_one("direct", true, args.config.block_size);
    }
    if (!args.out_csv.empty()) io::write_text(args.out_csv, csv);
    return 0;
}

struct PhantomArgs {
    std::string kind = "smooth-warp";
    std::string dims = "32";
    uint64_t seed = 1;
    std::string out_source;
    std::string out_target;
    std::string out_truth;
    std::string shift = "2,0,0";
    double amplitude = 2.5;
};

int run_phantom(const PhantomArgs& args) {
    PhantomSpec spec;
    spec.kind = phantom_kind_from_string(args.kind);
    spec.dims = parse_dims(args.dims);
    spec.seed = args.seed;
    spec.shift = parse_vec3(args.shift);
    spec.amplitude = args.amplitude;
    PhantomResult result = make_phantom(spec);
    io::write_volume(args.out_source, result.source);
    io::write_volume(args.out_target, result.target);
    if (!args.out_truth.empty()) io::write_field(args.out_truth, result.ground_truth);
    return 0;
}

void add_config_flags(CLI::App* cmd, RegistrationConfig& config) {
    cmd->add_option("--block-size", config.block_size, "Sub-region edge length n");
    cmd->add_option("--epsilon", config.epsilon, "Step length (voxel units)");
    cmd->add_option("--levels", config.levels, "Resolution levels k");
    cmd->add_option("--alpha", config.alpha, "Regularization weight in [0,1]");
    cmd->add_option("--tolerance", config.tolerance, "Minimum accepted improvement");
    cmd->add_option("--threads", config.worker_count, "Worker threads");
    cmd->add_option("--max-sweeps", config.max_sweeps, "Safety cap on sweeps per level");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blockreg: dense deformable volume registration via blocked graph cuts"};
    app.require_subcommand(1);

    RegisterArgs reg;
    CLI::App* reg_cmd = app.add_subcommand("register", "Register a source volume to a target");
    reg_cmd->add_option("--source", reg.source, "Source volume")->required();
    reg_cmd->add_option("--target", reg.target, "Target volume")->required();
    reg_cmd->add_option("--out-field", reg.out_field, "Output displacement field")->required();
    reg_cmd->add_option("--out-warped", reg.out_warped, "Output warped source volume");
    reg_cmd->add_option("--init-field", reg.init_field, "Initial displacement field");
    reg_cmd->add_option("--manifest", reg.manifest, "Run manifest (JSON)");
    reg_cmd->add_flag("--no-early-termination", reg.no_early_termination,
                      "Disable clean-block skipping");
    reg_cmd->add_flag("--direct", reg.direct, "Direct alpha-expansion (single whole-volume block)");
    add_config_flags(reg_cmd, reg.config);

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate fields or render QA images");
    eval_cmd->add_option("--forward-field", ev.forward_field, "Forward displacement field");
    eval_cmd->add_option("--reverse-field", ev.reverse_field, "Reverse displacement field");
    eval_cmd->add_flag("--vme", ev.want_vme, "Print the inverse-consistency VME");
    eval_cmd->add_option("--volume-a", ev.volume_a, "First volume (white channel)");
    eval_cmd->add_option("--volume-b", ev.volume_b, "Second volume (red channel)");
    eval_cmd->add_option("--checkerboard", ev.checkerboard_out, "Write checkerboard PPM here");
    eval_cmd->add_option("--tile", ev.tile, "Tile size in pixels");
    eval_cmd->add_option("--axis", ev.axis, "Slice axis (0=x, 1=y, 2=z)");
    eval_cmd->add_option("--slice", ev.slice, "Slice index (default: middle)");
    eval_cmd->add_option("--channel", ev.channel, "Channel to render");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Block-size sweep on a phantom pair");
    bench_cmd->add_option("--block-sizes", bench.block_sizes, "Block sizes to sweep")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--repeats", bench.repeats, "Repetitions of the sweep");
    bench_cmd->add_option("--phantom", bench.phantom_kind, "Phantom kind");
    bench_cmd->add_option("--dims", bench.dims, "Phantom dims (N or NXxNYxNZ)");
    bench_cmd->add_option("--seed", bench.seed, "Phantom seed");
    bench_cmd->add_flag("--direct", bench.direct, "Also run direct alpha-expansion");
    bench_cmd->add_option("--out", bench.out_csv, "Write the CSV table here");
    add_config_flags(bench_cmd, bench.config);

    PhantomArgs ph;
    CLI::App* ph_cmd = app.add_subcommand("phantom", "Generate a synthetic phantom pair");
    ph_cmd->add_option("--kind", ph.kind, "constant-shift, smooth-warp or two-channel-blob");
    ph_cmd->add_option("--dims", ph.dims, "Dims (N or NXxNYxNZ)");
    ph_cmd->add_option("--seed", ph.seed, "Seed");
    ph_cmd->add_option("--out-source", ph.out_source, "Source volume path")->required();
    ph_cmd->add_option("--out-target", ph.out_target, "Target volume path")->required();
    ph_cmd->add_option("--out-truth", ph.out_truth, "Ground-truth field path");
    ph_cmd->add_option("--shift", ph.shift, "Constant shift x,y,z");
    ph_cmd->add_option("--amplitude", ph.amplitude, "Max warp amplitude (voxels)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*reg_cmd) return run_register(reg);
        if (*eval_cmd) return run_eval(ev);
        if (*bench_cmd) return run_bench(bench);
        if (*ph_cmd) return run_phantom(ph);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
