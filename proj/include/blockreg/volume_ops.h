#pragma once

#include "blockreg/volume.h"

#include <vector>

namespace blockreg {

// Trilinear interpolation of the 8 surrounding grid values; coordinates
// outside [0, dim-1] clamp to the border.
double sample_trilinear(const Volume& vol, const double3& p, int channel);

// out(v, c) = source sampled at v + u(v). The field's grid defines the output.
Volume warp(const Volume& source, const DisplacementField& field);

// Displacement field of W_outer composed with W_inner; both fields must share
// a grid. result(x) = inner(x) + outer sampled at x + inner(x).
DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner);

// Separable 5-tap Gaussian (sigma = 1 voxel, renormalized where the kernel is
// truncated by a border) followed by decimation keeping even indices.
// Output dims = ceil(dim/2), spacing doubled.
Volume gaussian_downsample(const Volume& vol);

// Trilinear upsampling of a field onto the recorded finer grid; vectors are
// scaled by 2 because they are expressed in voxels of the finer grid.
DisplacementField upsample_field(const DisplacementField& field, const GridMeta& target_meta);

// Field analogue of gaussian_downsample: componentwise blur + decimate, with
// vectors halved to stay in voxel units of the coarser grid.
DisplacementField downsample_field(const DisplacementField& field);

struct Pyramid {
    std::vector<Volume> levels; // [0] = finest
};

// Builds `level_count` resolutions; throws if any intermediate dim drops
// below 2 (the error suggests a smaller level count).
Pyramid build_pyramid(const Volume& base, int level_count);

} // namespace blockreg
