#pragma once

#include "blockreg/energy.h"
#include "blockreg/move_solver.h"
#include "blockreg/volume.h"
#include "blockreg/volume_ops.h"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace blockreg {

// The six axis-aligned move vectors +/- epsilon*e_i, in fixed order
// (+x, -x, +y, -y, +z, -z).
struct DeltaSet {
    double step;
    std::array<double3, 6> vectors;

    explicit DeltaSet(double epsilon);
};

struct RegistrationConfig {
    double epsilon = 0.5;     // step length, voxel units
    int levels = 6;           // resolution levels k
    double alpha = 0.1;       // energy balance
    double tolerance = 1e-5;  // minimum accepted improvement (upsilon)
    int block_size = 16;      // sub-region edge n
    int worker_count = 1;
    bool early_termination = true;
    int max_sweeps = 1000;    // safety cap per level

    void validate() const;
    EnergyParams energy_params() const { return EnergyParams{alpha}; }
};

// Overlapping block family beta = B union B_shift with red-black coloring
// and the dependency lists used for early termination.
class BlockGrid {
public:
    struct Block {
        SubRegion region;
        int grid;  // 0 = B, 1 = B_shift
        int color; // parity of the block index sum
    };

    static BlockGrid make(const int3& dims, int block_size);
    static BlockGrid whole_volume(const int3& dims); // direct alpha-expansion

    const std::vector<Block>& blocks() const { return _blocks; }
    // Blocks whose region intersects Gamma(b): the writes that can invalidate
    // b's subproblem.
    const std::vector<int>& dependencies(int b) const { return _deps[b]; }
    // Block ids of one (grid, color) phase, in lexicographic order.
    const std::vector<int>& phase(int grid, int color) const { return _phases[grid * 2 + color]; }
    int grid_count() const { return _grid_count; }

private:
    std::vector<Block> _blocks;
    std::vector<std::vector<int>> _deps;
    std::array<std::vector<int>, 4> _phases;
    int _grid_count = 1;

    void build_deps(const int3& dims, int block_size, int shift);
};

struct SweepStats {
    int sweep = 0;
    double energy = 0.0;
    long accepted = 0;
    long evaluated = 0;
    long skipped = 0;
    double seconds = 0.0;
};

struct LevelReport {
    int level = 0;
    int3 dims;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    int sweeps = 0;
    long moves_accepted = 0;
    long blocks_evaluated = 0;
    long blocks_skipped = 0;
    bool converged = false;
    double seconds = 0.0;
    std::vector<SweepStats> trace;
};

struct RunReport {
    std::vector<LevelReport> levels;
    double final_energy = 0.0;
    double total_seconds = 0.0;
};

struct OptimizerHooks {
    // Per-sweep progress, consumed by the CLI.
    std::function<void(int level, const SweepStats&)> progress;
    // Called after each applied move; requires worker_count == 1.
    std::function<void(const SubRegion&, const double3&, const MoveResult&)> on_accept;
};

// One resolution level of the blocked move-making loop: u becomes locally
// optimal with respect to (beta, Delta).
LevelReport optimize_level(const Volume& target, const Volume& source, DisplacementField& u,
                           const RegistrationConfig& config, const OptimizerHooks& hooks = {},
                           int level = 0);

// Reference method: one block covering the whole grid.
LevelReport direct_alpha_expansion(const Volume& target, const Volume& source,
                                   DisplacementField& u, const RegistrationConfig& config,
                                   const OptimizerHooks& hooks = {}, int level = 0);

// Full multi-resolution registration. The optional initial field lives on the
// target grid and is downsampled to the coarsest level before optimization.
RunReport register_pair(const Volume& target, const Volume& source, DisplacementField& out,
                        const RegistrationConfig& config, const OptimizerHooks& hooks = {},
                        const DisplacementField* initial = nullptr, bool direct = false);

} // namespace blockreg
