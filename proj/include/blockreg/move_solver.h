#pragma once

#include "blockreg/energy.h"
#include "blockreg/maxflow.h"
#include "blockreg/types.h"
#include "blockreg/volume.h"

#include <cstdint>
#include <vector>

namespace blockreg {

// Axis-aligned box of voxels V' within a grid. Blocks are clipped to the
// grid before construction.
struct SubRegion {
    int3 origin;
    int3 extent;
    int3 grid_dims;

    // Clips [origin, origin+extent) to the grid; throws if nothing remains.
    static SubRegion clipped(const int3& origin, const int3& extent, const int3& grid_dims);

    bool contains(const int3& v) const {
        return v.x >= origin.x && v.x < origin.x + extent.x && v.y >= origin.y &&
               v.y < origin.y + extent.y && v.z >= origin.z && v.z < origin.z + extent.z;
    }
    bool in_grid(const int3& v) const {
        return v.x >= 0 && v.x < grid_dims.x && v.y >= 0 && v.y < grid_dims.y && v.z >= 0 &&
               v.z < grid_dims.z;
    }

    // Local lexicographic node index (x fastest).
    int local_index(const int3& v) const {
        return ((v.z - origin.z) * extent.y + (v.y - origin.y)) * extent.x + (v.x - origin.x);
    }

    std::size_t voxel_count() const {
        return (std::size_t)extent.x * (std::size_t)extent.y * (std::size_t)extent.z;
    }
};

struct MoveResult {
    std::vector<uint8_t> labeling; // region voxels, local lex order; 1 = add delta
    double energy_delta = 0.0;     // f(u') - f(u), realizable (quantized) states
    bool changed = false;          // energy_delta + tolerance < 0
    CompensatedSum delta_exact;    // carries the compensation for energy tracking
};

// Binary labeling graph for one (V', delta) move: unary terms per region
// voxel, submodular pairwise terms for interior pairs, boundary pairs folded
// into the inside voxel's unary with the outside label fixed to 0. Constant
// terms are omitted; move deltas are re-evaluated exactly instead.
FlowGraph build_move_graph(const Volume& target, const Volume& source,
                           const DisplacementField& u, const SubRegion& region,
                           const double3& delta, const EnergyParams& params);

MoveResult solve_move(const Volume& target, const Volume& source, const DisplacementField& u,
                      const SubRegion& region, const double3& delta, const EnergyParams& params,
                      double tolerance);

// u(v) += delta for every region voxel with label 1.
void apply_move(DisplacementField& u, const SubRegion& region, const double3& delta,
                const std::vector<uint8_t>& labeling);

} // namespace blockreg
