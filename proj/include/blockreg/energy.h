#pragma once

#include "blockreg/types.h"
#include "blockreg/volume.h"

namespace blockreg {

struct EnergyParams {
    double alpha = 0.1; // balance between data and regularization terms
    void validate() const;
};

// phi_v at labels 0 and 1, (1-alpha)-weighted.
struct UnaryPair {
    double e0 = 0.0;
    double e1 = 0.0;
};

// phi_{v,w} at the four label pairs, alpha-weighted. e00 == e11 always.
struct BinaryQuad {
    double e00 = 0.0;
    double e01 = 0.0;
    double e10 = 0.0;
    double e11 = 0.0;
};

// Weighted data and regularization sums carried with their compensation
// terms, so that differences of totals stay meaningful at the move-tolerance
// scale.
struct EnergyBreakdown {
    CompensatedSum data_weighted; // sum of (1-alpha) * per-voxel mean-channel SSD
    CompensatedSum reg_weighted;  // sum of alpha * per-pair squared vector difference

    CompensatedSum combined() const {
        CompensatedSum t = data_weighted;
        t.add(reg_weighted);
        return t;
    }
    double total() const { return combined().value(); }
};

// The displacement a move would actually store (fields hold f32 vectors).
// Move deltas are evaluated at these representable points so that a local
// delta equals the global energy difference of the applied move exactly.
// The volatile keeps the f32 rounding from being elided: GCC's SLP
// vectorizer (seen on 11.4) illegally folds double->float->double chains.
inline double quantize_component(double x) {
    volatile float f = (float)x;
    return (double)f;
}

inline double3 quantize_displacement(const double3& u) {
    return {quantize_component(u.x), quantize_component(u.y), quantize_component(u.z)};
}

// (1-alpha) * mean-channel squared difference between T at voxel v and S
// sampled at v + disp. The single shared definition of a data term.
double point_data_term(const Volume& target, const Volume& source, const int3& v,
                       const double3& disp, const EnergyParams& params);

// alpha * squared distance of two displacement vectors.
double pair_reg_term(const double3& uv, const double3& uw, const EnergyParams& params);

// Sum over voxels of mean-channel |T(v,c) - S(v+u(v),c)|^2 (unweighted).
double data_term(const Volume& target, const Volume& source, const DisplacementField& u,
                 const EnergyParams& params);

// Sum over unordered 6-neighbor pairs of |u(v) - u(w)|^2 (unweighted).
double regularization_term(const DisplacementField& u);

// (1-alpha) * data + alpha * reg, accumulated per-term.
double total_energy(const Volume& target, const Volume& source, const DisplacementField& u,
                    const EnergyParams& params);

// Full weighted evaluation with compensation, for exact energy bookkeeping.
EnergyBreakdown evaluate_energy(const Volume& target, const Volume& source,
                                const DisplacementField& u, const EnergyParams& params);

// Unary table for voxel v and move vector delta (labels: keep / add delta).
UnaryPair unary_terms(const Volume& target, const Volume& source, const DisplacementField& u,
                      const int3& v, const double3& delta, const EnergyParams& params);

// Binary table for the 6-neighbor pair (v, w); throws if not adjacent.
BinaryQuad binary_terms(const DisplacementField& u, const int3& v, const int3& w,
                        const double3& delta, const EnergyParams& params);

// e00 + e11 <= e01 + e10, with a small absolute slack.
bool check_submodular(const BinaryQuad& q);

} // namespace blockreg
