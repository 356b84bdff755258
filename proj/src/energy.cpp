#include "blockreg/energy.h"

#include "blockreg/detail/interp.h"
#include "blockreg/kernels.h"

#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace blockreg {

namespace {

// Mean-channel squared difference; fixed accumulation order.
inline double channel_ssd(const float* target_vals, const double* samples, int nc) {
    double acc = 0.0;
    for (int c = 0; c < nc; ++c) {
        double d = (double)target_vals[c] - samples[c];
        acc += d * d;
    }
    return acc / (double)nc;
}

void check_pair(const Volume& target, const Volume& source, const DisplacementField& u) {
    if (!(target.dims() == u.dims())) {
        throw std::invalid_argument("energy: target and field must share a grid");
    }
    if (target.channels() != source.channels()) {
        throw std::invalid_argument("energy: source and target channel counts differ");
    }
}

// Accumulates weight * per-voxel SSD over the whole grid.
CompensatedSum accumulate_data(const Volume& target, const Volume& source,
                               const DisplacementField& u, double weight) {
    const int3 d = target.dims();
    const int nc = target.channels();
    const int3 sd = source.dims();
    const auto& kern = kernels::active();
    std::vector<double> row((std::size_t)d.x * nc);
    CompensatedSum sum;
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            const float* disp = u.data() + u.vector_index(0, y, z);
            kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, disp,
                          0.0, (double)y, (double)z, 1.0, 0.0, 0.0, 0.0,
                          row.data(), d.x);
            const float* trow = target.data() + target.index(0, y, z);
            for (int x = 0; x < d.x; ++x) {
                sum.add(weight * channel_ssd(trow + x * nc, row.data() + x * nc, nc));
            }
        }
    }
    return sum;
}

// Accumulates weight * squared vector difference over all 6-neighbor pairs,
// each unordered pair counted once.
CompensatedSum accumulate_reg(const DisplacementField& u, double weight) {
    const int3 d = u.dims();
    const auto& kern = kernels::active();
    std::vector<double> out((std::size_t)d.x);
    CompensatedSum sum;
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            const float* row = u.data() + u.vector_index(0, y, z);
            if (d.x > 1) {
                kern.pair_sqdist_row(row, row + 3, out.data(), d.x - 1);
                for (int i = 0; i < d.x - 1; ++i) sum.add(weight * out[i]);
            }
            if (y + 1 < d.y) {
                kern.pair_sqdist_row(row, u.data() + u.vector_index(0, y + 1, z), out.data(), d.x);
                for (int i = 0; i < d.x; ++i) sum.add(weight * out[i]);
            }
            if (z + 1 < d.z) {
                kern.pair_sqdist_row(row, u.data() + u.vector_index(0, y, z + 1), out.data(), d.x);
                for (int i = 0; i < d.x; ++i) sum.add(weight * out[i]);
            }
        }
    }
    return sum;
}

} // namespace

void EnergyParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("EnergyParams: alpha must lie in [0,1]");
    }
}

double point_data_term(const Volume& target, const Volume& source, const int3& v,
                       const double3& disp, const EnergyParams& params) {
    const int nc = target.channels();
    const int3 sd = source.dims();
    double px = (double)v.x + disp.x;
    double py = (double)v.y + disp.y;
    double pz = (double)v.z + disp.z;
    double samples[8];
    double* s = samples;
    std::vector<double> heap;
    if (nc > 8) {
        heap.resize(nc);
        s = heap.data();
    }
    for (int c = 0; c < nc; ++c) {
        s[c] = detail::sample_one(source.data(), sd.x, sd.y, sd.z, nc, px, py, pz, c);
    }
    const float* tvals = target.data() + target.index(v.x, v.y, v.z, 0);
    return (1.0 - params.alpha) * channel_ssd(tvals, s, nc);
}

double pair_reg_term(const double3& uv, const double3& uw, const EnergyParams& params) {
    return params.alpha * norm_sq(uv - uw);
}

double data_term(const Volume& target, const Volume& source, const DisplacementField& u,
                 const EnergyParams& params) {
    params.validate();
    check_pair(target, source, u);
    return accumulate_data(target, source, u, 1.0).value();
}

double regularization_term(const DisplacementField& u) {
    return accumulate_reg(u, 1.0).value();
}

double total_energy(const Volume& target, const Volume& source, const DisplacementField& u,
                    const EnergyParams& params) {
    return evaluate_energy(target, source, u, params).total();
}

EnergyBreakdown evaluate_energy(const Volume& target, const Volume& source,
                                const DisplacementField& u, const EnergyParams& params) {
    params.validate();
    check_pair(target, source, u);
    EnergyBreakdown bd;
    bd.data_weighted = accumulate_data(target, source, u, 1.0 - params.alpha);
    bd.reg_weighted = accumulate_reg(u, params.alpha);
    return bd;
}

UnaryPair unary_terms(const Volume& target, const Volume& source, const DisplacementField& u,
                      const int3& v, const double3& delta, const EnergyParams& params) {
    double3 d = u.get(v);
    UnaryPair p;
    p.e0 = point_data_term(target, source, v, d, params);
    p.e1 = point_data_term(target, source, v, d + delta, params);
    return p;
}

BinaryQuad binary_terms(const DisplacementField& u, const int3& v, const int3& w,
                        const double3& delta, const EnergyParams& params) {
    int3 diff = v - w;
    int manhattan = std::abs(diff.x) + std::abs(diff.y) + std::abs(diff.z);
    if (manhattan != 1) {
        throw std::invalid_argument("binary_terms: voxels are not 6-neighbors");
    }
    double3 uv = u.get(v);
    double3 uw = u.get(w);
    BinaryQuad q;
    q.e00 = pair_reg_term(uv, uw, params);
    q.e11 = q.e00; // identical by construction: the shared delta cancels
    q.e10 = pair_reg_term(uv + delta, uw, params);
    q.e01 = pair_reg_term(uv, uw + delta, params);
    return q;
}

bool check_submodular(const BinaryQuad& q) {
    return q.e00 + q.e11 <= q.e01 + q.e10 + 1e-9;
}

} // namespace blockreg
