#pragma once

#include "blockreg/volume.h"

#include <cstdint>
#include <string>

namespace blockreg {

enum class PhantomKind {
    ConstantShift, // ground truth is a single constant vector
    SmoothWarp,    // smooth random bump field
    TwoChannelBlob // two-channel image with a smooth warp
};

PhantomKind phantom_kind_from_string(const std::string& name);
std::string to_string(PhantomKind kind);

struct PhantomSpec {
    PhantomKind kind = PhantomKind::SmoothWarp;
    int3 dims{32, 32, 32};
    uint64_t seed = 1;
    double3 shift{2.0, 0.0, 0.0}; // constant-shift ground truth
    double amplitude = 2.5;       // max ground-truth vector norm, voxels
};

struct PhantomResult {
    Volume source;
    Volume target; // source warped by the ground truth
    DisplacementField ground_truth;
};

// Deterministic seeded phantom pair: blobs on a ramp background, warped by a
// known field. Stands in for cohort data in experiments and tests.
PhantomResult make_phantom(const PhantomSpec& spec);

} // namespace blockreg
