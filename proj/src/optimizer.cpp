#include "blockreg/optimizer.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace blockreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

} // namespace

DeltaSet::DeltaSet(double epsilon) : step(epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("DeltaSet: step must be > 0");
    vectors = {double3{epsilon, 0, 0}, double3{-epsilon, 0, 0}, double3{0, epsilon, 0},
               double3{0, -epsilon, 0}, double3{0, 0, epsilon}, double3{0, 0, -epsilon}};
}

void RegistrationConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
    if (levels < 1) throw std::invalid_argument("config: levels must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("config: alpha must be in [0,1]");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("config: tolerance must be >= 0");
    if (block_size < 1) throw std::invalid_argument("config: block size must be >= 1");
    if (worker_count < 1) throw std::invalid_argument("config: worker count must be >= 1");
    if (max_sweeps < 1) throw std::invalid_argument("config: max sweeps must be >= 1");
}

BlockGrid BlockGrid::make(const int3& dims, int block_size) {
    if (block_size < 1) throw std::invalid_argument("BlockGrid: block size must be >= 1");
    BlockGrid bg;
    const int n = block_size;
    const int shift = n / 2;

    auto add_lattice = [&](int grid, int offset) {
        // Lattice origins offset + k*n; clipped blocks cover the whole grid.
        int cx = ceil_div(dims.x - offset, n);
        int cy = ceil_div(dims.y - offset, n);
        int cz = ceil_div(dims.z - offset, n);
        for (int bz = 0; bz < cz; ++bz) {
            for (int by = 0; by < cy; ++by) {
                for (int bx = 0; bx < cx; ++bx) {
                    int3 origin{offset + bx * n, offset + by * n, offset + bz * n};
                    SubRegion region = SubRegion::clipped(origin, {n, n, n}, dims);
                    int color = (bx + by + bz) & 1;
                    bg._blocks.push_back({region, grid, color});
                }
            }
        }
    };

    add_lattice(0, 0);
    bg._grid_count = 1;
    if (shift > 0) {
        // Translated by n/2 along each dimension; the leading partial block
        // is kept so the shifted family also covers the volume.
        add_lattice(1, -shift);
        bg._grid_count = 2;
    }

    for (int b = 0; b < (int)bg._blocks.size(); ++b) {
        const Block& blk = bg._blocks[b];
        bg._phases[blk.grid * 2 + blk.color].push_back(b);
    }
    bg.build_deps(dims, n, shift);
    return bg;
}

BlockGrid BlockGrid::whole_volume(const int3& dims) {
    BlockGrid bg;
    bg._blocks.push_back({SubRegion::clipped({0, 0, 0}, dims, dims), 0, 0});
    bg._phases[0].push_back(0);
    bg._deps.push_back({0});
    bg._grid_count = 1;
    return bg;
}

void BlockGrid::build_deps(const int3& dims, int n, int shift) {
    _deps.assign(_blocks.size(), {});

    // Index counts per lattice, mirrored from make().
    auto lattice_counts = [&](int offset) {
        return int3{ceil_div(dims.x - offset, n), ceil_div(dims.y - offset, n),
                    ceil_div(dims.z - offset, n)};
    };
    int3 c0 = lattice_counts(0);
    int3 c1 = shift > 0 ? lattice_counts(-shift) : int3{0, 0, 0};
    const int base1 = c0.x * c0.y * c0.z;

    auto range = [&](int lo, int hi, int offset, int count, int& kmin, int& kmax) {
        // Lattice indices whose block [offset + k*n, offset + (k+1)*n) meets [lo, hi].
        kmin = (int)std::floor((double)(lo - offset) / n);
        kmax = (int)std::floor((double)(hi - offset) / n);
        if (kmin < 0) kmin = 0;
        if (kmax > count - 1) kmax = count - 1;
    };

    for (int b = 0; b < (int)_blocks.size(); ++b) {
        const SubRegion& r = _blocks[b].region;
        // Bounding box of Gamma(V') (region plus one-voxel rim), clipped.
        // The box hull is a superset of Gamma, so the dependency lists are
        // conservative; skips stay exact.
        int lox = std::max(r.origin.x - 1, 0), hix = std::min(r.origin.x + r.extent.x, dims.x - 1);
        int loy = std::max(r.origin.y - 1, 0), hiy = std::min(r.origin.y + r.extent.y, dims.y - 1);
        int loz = std::max(r.origin.z - 1, 0), hiz = std::min(r.origin.z + r.extent.z, dims.z - 1);

        auto collect = [&](int offset, const int3& counts, int id_base) {
            if (counts.x <= 0) return;
            int xmin, xmax, ymin, ymax, zmin, zmax;
            range(lox, hix, offset, counts.x, xmin, xmax);
            range(loy, hiy, offset, counts.y, ymin, ymax);
            range(loz, hiz, offset, counts.z, zmin, zmax);
            for (int bz = zmin; bz <= zmax; ++bz) {
                for (int by = ymin; by <= ymax; ++by) {
                    for (int bx = xmin; bx <= xmax; ++bx) {
                        _deps[b].push_back(id_base + (bz * counts.y + by) * counts.x + bx);
                    }
                }
            }
        };
        collect(0, c0, 0);
        if (shift > 0) collect(-shift, c1, base1);
    }
}

namespace {

struct BlockOutcome {
    bool evaluated = false;
    bool changed = false;
    long accepted = 0;
    CompensatedSum delta;
};

// Shared state for one level run.
struct LevelRun {
    const Volume& target;
    const Volume& source;
    DisplacementField& u;
    const RegistrationConfig& config;
    const OptimizerHooks& hooks;
    const BlockGrid& grid;
    DeltaSet deltas;
    EnergyParams params;

    std::vector<long> eval_stamp;   // phase of last evaluation (-1: never)
    std::vector<long> change_stamp; // phase of last accepted change
    long phase_no = 0;

    LevelRun(const Volume& t, const Volume& s, DisplacementField& field,
             const RegistrationConfig& cfg, const OptimizerHooks& h, const BlockGrid& g)
        : target(t), source(s), u(field), config(cfg), hooks(h), grid(g),
          deltas(cfg.epsilon), params(cfg.energy_params()) {
        eval_stamp.assign(grid.blocks().size(), -1);
        change_stamp.assign(grid.blocks().size(), -1);
    }

    bool needs_eval(int b) const {
        if (eval_stamp[b] < 0) return true;
        for (int d : grid.dependencies(b)) {
            if (change_stamp[d] >= eval_stamp[b]) return true;
        }
        return false;
    }

    BlockOutcome process_block(int b) {
        BlockOutcome out;
        out.evaluated = true;
        const SubRegion& region = grid.blocks()[b].region;
        for (const double3& delta : deltas.vectors) {
            MoveResult mv = solve_move(target, source, u, region, delta, params,
                                       config.tolerance);
            if (mv.changed) {
                apply_move(u, region, delta, mv.labeling);
                out.changed = true;
                out.accepted += 1;
                out.delta.add(mv.delta_exact);
                if (hooks.on_accept) hooks.on_accept(region, delta, mv);
            }
        }
        return out;
    }
};

LevelReport run_level(const Volume& target, const Volume& source, DisplacementField& u,
                      const RegistrationConfig& config, const OptimizerHooks& hooks,
                      const BlockGrid& grid, int level) {
    config.validate();
    if (hooks.on_accept && config.worker_count != 1) {
        throw std::invalid_argument("optimizer: move observers require worker_count == 1");
    }
    auto t0 = Clock::now();

    LevelRun run(target, source, u, config, hooks, grid);
    CompensatedSum energy = evaluate_energy(target, source, u, config.energy_params()).combined();

    LevelReport report;
    report.level = level;
    report.dims = target.dims();
    report.initial_energy = energy.value();

    std::vector<BlockOutcome> outcomes(grid.blocks().size());
    std::vector<int> to_run;

    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        auto sweep_t0 = Clock::now();
        SweepStats stats;
        stats.sweep = sweep;

        for (int g = 0; g < grid.grid_count(); ++g) {
            for (int color = 0; color < 2; ++color) {
                const std::vector<int>& phase = grid.phase(g, color);
                if (phase.empty()) continue;

                to_run.clear();
                for (int b : phase) {
                    if (!config.early_termination || run.needs_eval(b)) {
                        to_run.push_back(b);
                    } else {
                        stats.skipped += 1;
                    }
                }

                if (config.worker_count == 1 || to_run.size() <= 1) {
                    for (int b : to_run) outcomes[b] = run.process_block(b);
                } else {
                    std::atomic<std::size_t> next{0};
                    int nthreads = std::min<int>(config.worker_count, (int)to_run.size());
                    std::vector<std::thread> pool;
                    pool.reserve(nthreads);
                    for (int t = 0; t < nthreads; ++t) {
                        pool.emplace_back([&] {
                            for (;;) {
                                std::size_t i = next.fetch_add(1);
                                if (i >= to_run.size()) break;
                                int b = to_run[i];
                                outcomes[b] = run.process_block(b);
                            }
                        });
                    }
                    for (auto& th : pool) th.join();
                }

                // Deterministic merge in block order.
                for (int b : to_run) {
                    const BlockOutcome& out = outcomes[b];
                    run.eval_stamp[b] = run.phase_no;
                    if (out.changed) run.change_stamp[b] = run.phase_no;
                    stats.evaluated += 1;
                    stats.accepted += out.accepted;
                    energy.add(out.delta);
                }
                run.phase_no += 1;
            }
        }

        stats.energy = energy.value();
        stats.seconds = seconds_since(sweep_t0);
        report.trace.push_back(stats);
        report.sweeps = sweep + 1;
        report.moves_accepted += stats.accepted;
        report.blocks_evaluated += stats.evaluated;
        report.blocks_skipped += stats.skipped;
        if (hooks.progress) hooks.progress(level, stats);

        if (stats.accepted == 0) {
            report.converged = true;
            break;
        }
    }

    report.final_energy = energy.value();
    report.seconds = seconds_since(t0);
    return report;
}

} // namespace

LevelReport optimize_level(const Volume& target, const Volume& source, DisplacementField& u,
                           const RegistrationConfig& config, const OptimizerHooks& hooks,
                           int level) {
    if (!(target.dims() == u.dims())) {
        throw std::invalid_argument("optimize_level: target and field must share a grid");
    }
    BlockGrid grid = BlockGrid::make(target.dims(), config.block_size);
    return run_level(target, source, u, config, hooks, grid, level);
}

LevelReport direct_alpha_expansion(const Volume& target, const Volume& source,
                                   DisplacementField& u, const RegistrationConfig& config,
                                   const OptimizerHooks& hooks, int level) {
    if (!(target.dims() == u.dims())) {
        throw std::invalid_argument("direct_alpha_expansion: target and field must share a grid");
    }
    BlockGrid grid = BlockGrid::whole_volume(target.dims());
    return run_level(target, source, u, config, hooks, grid, level);
}

RunReport register_pair(const Volume& target, const Volume& source, DisplacementField& out,
                        const RegistrationConfig& config, const OptimizerHooks& hooks,
                        const DisplacementField* initial, bool direct) {
    config.validate();
    if (target.channels() != source.channels()) {
        throw std::invalid_argument("register: source and target channel counts differ");
    }
    auto t0 = Clock::now();

    Pyramid tpyr = build_pyramid(target, config.levels);
    Pyramid spyr = build_pyramid(source, config.levels);

    DisplacementField u;
    if (initial) {
        if (!(initial->dims() == target.dims())) {
            throw std::invalid_argument("register: initial field must live on the target grid");
        }
        DisplacementField f = *initial;
        for (int l = 1; l < config.levels; ++l) f = downsample_field(f);
        u = std::move(f);
    } else {
        u = DisplacementField(tpyr.levels.back().dims());
    }

    RunReport report;
    for (int level = config.levels - 1; level >= 0; --level) {
        const Volume& t = tpyr.levels[level];
        const Volume& s = spyr.levels[level];
        LevelReport lr = direct ? direct_alpha_expansion(t, s, u, config, hooks, level)
                                : optimize_level(t, s, u, config, hooks, level);
        report.levels.push_back(lr);
        if (level > 0) {
            u = upsample_field(u, tpyr.levels[level - 1].meta());
        }
    }
    report.final_energy = report.levels.back().final_energy;
    report.total_seconds = seconds_since(t0);
    out = std::move(u);
    return report;
}

} // namespace blockreg
