#include "blockreg/move_solver.h"

#include "blockreg/kernels.h"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace blockreg {

namespace {

constexpr int3 kDirs[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

// Mean-channel squared difference; must match energy.cpp's accumulation.
inline double channel_ssd(const float* target_vals, const double* samples, int nc) {
    double acc = 0.0;
    for (int c = 0; c < nc; ++c) {
        double d = (double)target_vals[c] - samples[c];
        acc += d * d;
    }
    return acc / (double)nc;
}

// Reused per-thread scratch; block solves run in a tight loop.
struct Scratch {
    FlowGraph graph;
    std::vector<double> cost0; // signed unary accumulation, folded at the end
    std::vector<double> cost1;
    std::vector<double> row0;
    std::vector<double> row1;
    std::vector<double> e_old;
    std::vector<double> e_new;
    std::vector<float> qdisp;
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

// Submodular pairwise term via the standard reparameterization.
void add_pair(Scratch& s, int i, int j, double a, double b, double c, double d) {
    s.cost0[i] += a;
    s.cost1[i] += d;
    b -= a;
    c -= d;
    if (b < 0.0) {
        s.cost0[i] += b;
        s.cost1[j] += b;
        s.graph.add_edge(i, j, 0.0, std::max(b + c, 0.0));
    } else if (c < 0.0) {
        s.cost0[i] += -c;
        s.cost1[j] += -c;
        s.graph.add_edge(i, j, std::max(b + c, 0.0), 0.0);
    } else {
        s.graph.add_edge(i, j, b, c);
    }
}

void build_graph(Scratch& s, const Volume& target, const Volume& source,
                 const DisplacementField& u, const SubRegion& region, const double3& delta,
                 const EnergyParams& params) {
    params.validate();
    const int nodes = (int)region.voxel_count();
    const int nc = target.channels();
    const int3 sd = source.dims();
    const auto& kern = kernels::active();

    s.graph.reset(nodes);
    s.graph.reserve_edges((std::size_t)nodes * 3);
    s.cost0.assign(nodes, 0.0);
    s.cost1.assign(nodes, 0.0);
    s.row0.resize((std::size_t)region.extent.x * nc);
    s.row1.resize(s.row0.size());

    // Unary terms (data at u and at u+delta), built row-wise.
    const double w_data = 1.0 - params.alpha;
    for (int z = region.origin.z; z < region.origin.z + region.extent.z; ++z) {
        for (int y = region.origin.y; y < region.origin.y + region.extent.y; ++y) {
            const float* disp = u.data() + u.vector_index(region.origin.x, y, z);
            kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, disp,
                          (double)region.origin.x, (double)y, (double)z, 1.0,
                          0.0, 0.0, 0.0, s.row0.data(), region.extent.x);
            kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, disp,
                          (double)region.origin.x, (double)y, (double)z, 1.0,
                          delta.x, delta.y, delta.z, s.row1.data(), region.extent.x);
            const float* trow = target.data() + target.index(region.origin.x, y, z);
            int node = region.local_index({region.origin.x, y, z});
            for (int i = 0; i < region.extent.x; ++i) {
                s.cost0[node + i] += w_data * channel_ssd(trow + i * nc, s.row0.data() + i * nc, nc);
                s.cost1[node + i] += w_data * channel_ssd(trow + i * nc, s.row1.data() + i * nc, nc);
            }
        }
    }

    // Pairwise terms: interior pairs once (from the positive direction),
    // boundary pairs folded into the inside voxel with the outside label 0.
    for (int z = region.origin.z; z < region.origin.z + region.extent.z; ++z) {
        for (int y = region.origin.y; y < region.origin.y + region.extent.y; ++y) {
            for (int x = region.origin.x; x < region.origin.x + region.extent.x; ++x) {
                int3 v{x, y, z};
                int vi = region.local_index(v);
                double3 uv = u.get(v);
                for (int dir = 0; dir < 6; ++dir) {
                    int3 w = v + kDirs[dir];
                    if (!region.in_grid(w)) continue;
                    bool positive = (dir % 2) == 0;
                    double3 uw = u.get(w);
                    if (region.contains(w)) {
                        if (!positive) continue;
                        double e00 = pair_reg_term(uv, uw, params);
                        double e10 = pair_reg_term(uv + delta, uw, params);
                        double e01 = pair_reg_term(uv, uw + delta, params);
                        add_pair(s, vi, region.local_index(w), e00, e01, e10, e00);
                    } else {
                        double e00 = pair_reg_term(uv, uw, params);
                        double e10 = pair_reg_term(uv + delta, uw, params);
                        s.cost0[vi] += e00;
                        s.cost1[vi] += e10;
                    }
                }
            }
        }
    }

    for (int i = 0; i < nodes; ++i) {
        double net = s.cost1[i] - s.cost0[i];
        if (net >= 0.0) s.graph.add_terminal(i, net, 0.0);
        else s.graph.add_terminal(i, 0.0, -net);
    }
}

} // namespace

SubRegion SubRegion::clipped(const int3& origin, const int3& extent, const int3& grid_dims) {
    int3 lo{std::max(origin.x, 0), std::max(origin.y, 0), std::max(origin.z, 0)};
    int3 hi{std::min(origin.x + extent.x, grid_dims.x), std::min(origin.y + extent.y, grid_dims.y),
            std::min(origin.z + extent.z, grid_dims.z)};
    int3 ext = hi - lo;
    if (ext.x < 1 || ext.y < 1 || ext.z < 1) {
        throw std::invalid_argument("SubRegion: block does not intersect the grid");
    }
    return SubRegion{lo, ext, grid_dims};
}

FlowGraph build_move_graph(const Volume& target, const Volume& source,
                           const DisplacementField& u, const SubRegion& region,
                           const double3& delta, const EnergyParams& params) {
    Scratch s;
    build_graph(s, target, source, u, region, delta, params);
    return std::move(s.graph);
}

MoveResult solve_move(const Volume& target, const Volume& source, const DisplacementField& u,
                      const SubRegion& region, const double3& delta, const EnergyParams& params,
                      double tolerance) {
    if (!(tolerance >= 0.0)) {
        throw std::invalid_argument("solve_move: tolerance must be >= 0");
    }
    Scratch& s = scratch();
    build_graph(s, target, source, u, region, delta, params);
    CutResult cut = solve(s.graph);

    MoveResult result;
    result.labeling = std::move(cut.side);
    const auto& labeling = result.labeling;

    // Exact local delta over changed terms, at the displacement values the
    // move would actually store. Data terms are batched per row; the
    // accumulation order below is the contract the ICM oracle mirrors.
    const int nc = target.channels();
    const int3 sd = source.dims();
    const auto& kern = kernels::active();
    s.row0.resize((std::size_t)region.extent.x * nc);
    s.row1.resize(s.row0.size());
    s.e_old.resize((std::size_t)region.extent.x);
    s.e_new.resize(s.e_old.size());
    s.qdisp.resize((std::size_t)region.extent.x * 3);
    const double w_data = 1.0 - params.alpha;

    CompensatedSum dsum;
    for (int z = region.origin.z; z < region.origin.z + region.extent.z; ++z) {
        for (int y = region.origin.y; y < region.origin.y + region.extent.y; ++y) {
            int row_node = region.local_index({region.origin.x, y, z});
            bool any = false;
            for (int i = 0; i < region.extent.x; ++i) {
                if (labeling[row_node + i]) {
                    any = true;
                    break;
                }
            }
            const float* disp = u.data() + u.vector_index(region.origin.x, y, z);
            if (any) {
                for (int i = 0; i < region.extent.x; ++i) {
                    if (labeling[row_node + i]) {
                        s.qdisp[3 * i] = (float)((double)disp[3 * i] + delta.x);
                        s.qdisp[3 * i + 1] = (float)((double)disp[3 * i + 1] + delta.y);
                        s.qdisp[3 * i + 2] = (float)((double)disp[3 * i + 2] + delta.z);
                    } else {
                        s.qdisp[3 * i] = disp[3 * i];
                        s.qdisp[3 * i + 1] = disp[3 * i + 1];
                        s.qdisp[3 * i + 2] = disp[3 * i + 2];
                    }
                }
                kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, disp,
                              (double)region.origin.x, (double)y, (double)z, 1.0,
                              0.0, 0.0, 0.0, s.row0.data(), region.extent.x);
                kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, s.qdisp.data(),
                              (double)region.origin.x, (double)y, (double)z, 1.0,
                              0.0, 0.0, 0.0, s.row1.data(), region.extent.x);
                const float* trow = target.data() + target.index(region.origin.x, y, z);
                for (int i = 0; i < region.extent.x; ++i) {
                    s.e_old[i] = w_data * channel_ssd(trow + i * nc, s.row0.data() + i * nc, nc);
                    s.e_new[i] = w_data * channel_ssd(trow + i * nc, s.row1.data() + i * nc, nc);
                }
            }
            for (int x = region.origin.x; x < region.origin.x + region.extent.x; ++x) {
                int3 v{x, y, z};
                int vi = region.local_index(v);
                bool lv = labeling[vi] != 0;
                double3 uv = u.get(v);
                double3 uv_new = lv ? quantize_displacement(uv + delta) : uv;
                if (lv) {
                    dsum.add(s.e_new[x - region.origin.x] - s.e_old[x - region.origin.x]);
                }
                for (int dir = 0; dir < 6; ++dir) {
                    int3 w = v + kDirs[dir];
                    if (!region.in_grid(w)) continue;
                    double3 uw = u.get(w);
                    if (region.contains(w)) {
                        if ((dir % 2) != 0) continue; // interior pairs once
                        bool lw = labeling[region.local_index(w)] != 0;
                        if (!lv && !lw) continue;
                        double3 uw_new = lw ? quantize_displacement(uw + delta) : uw;
                        dsum.add(pair_reg_term(uv_new, uw_new, params) -
                                 pair_reg_term(uv, uw, params));
                    } else if (lv) {
                        dsum.add(pair_reg_term(uv_new, uw, params) -
                                 pair_reg_term(uv, uw, params));
                    }
                }
            }
        }
    }

    result.delta_exact = dsum;
    result.energy_delta = dsum.value();
    result.changed = result.energy_delta + tolerance < 0.0;
    return result;
}

void apply_move(DisplacementField& u, const SubRegion& region, const double3& delta,
                const std::vector<uint8_t>& labeling) {
    if (labeling.size() != region.voxel_count()) {
        throw std::invalid_argument("apply_move: labeling does not cover the region");
    }
    for (int z = region.origin.z; z < region.origin.z + region.extent.z; ++z) {
        for (int y = region.origin.y; y < region.origin.y + region.extent.y; ++y) {
            for (int x = region.origin.x; x < region.origin.x + region.extent.x; ++x) {
                int3 v{x, y, z};
                if (labeling[region.local_index(v)]) {
                    u.set(v, u.get(v) + delta);
                }
            }
        }
    }
}

} // namespace blockreg
