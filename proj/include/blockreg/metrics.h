#pragma once

#include "blockreg/volume.h"

#include <cstdint>
#include <vector>

namespace blockreg {

// Inverse-consistency vector magnitude error: mean over voxels of
// |x - W_reverse(W_forward(x))|, in voxel units. Fields must share a grid.
double vme(const DisplacementField& forward, const DisplacementField& reverse);

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // RGB8, row-major, top row first
};

// QA rendering: one slice whose tiles alternate between the two volumes,
// A in the white channel, B in the red channel. Values are min-max
// normalized per volume.
RgbImage checkerboard(const Volume& a, const Volume& b, int tile, int slice_axis,
                      int slice_index, int channel = 0);

struct EvalReport {
    double final_energy = 0.0;
    double vme = 0.0;
    std::vector<double> level_seconds;
    long moves_accepted = 0;
    long blocks_skipped = 0;
};

} // namespace blockreg
