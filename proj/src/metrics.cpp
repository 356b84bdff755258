#include "blockreg/metrics.h"

#include "blockreg/types.h"
#include "blockreg/volume_ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockreg {

double vme(const DisplacementField& forward, const DisplacementField& reverse) {
    if (!(forward.dims() == reverse.dims())) {
        throw std::invalid_argument("vme: fields must share a grid");
    }
    DisplacementField residual = compose(reverse, forward);
    const int3 d = residual.dims();
    CompensatedSum sum;
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            for (int x = 0; x < d.x; ++x) {
                sum.add(norm(residual.get(x, y, z)));
            }
        }
    }
    return sum.value() / (double)residual.voxel_count();
}

namespace {

struct MinMax {
    double lo;
    double hi;
};

MinMax value_range(const Volume& v, int channel) {
    double lo = v.at(0, 0, 0, channel);
    double hi = lo;
    const int3 d = v.dims();
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            for (int x = 0; x < d.x; ++x) {
                double val = v.at(x, y, z, channel);
                lo = std::min(lo, val);
                hi = std::max(hi, val);
            }
        }
    }
    return {lo, hi};
}

uint8_t to_byte(double v, const MinMax& mm) {
    double t = mm.hi > mm.lo ? (v - mm.lo) / (mm.hi - mm.lo) : 0.0;
    int b = (int)std::lround(t * 255.0);
    return (uint8_t)std::clamp(b, 0, 255);
}

} // namespace

RgbImage checkerboard(const Volume& a, const Volume& b, int tile, int slice_axis,
                      int slice_index, int channel) {
    if (!(a.dims() == b.dims())) {
        throw std::invalid_argument("checkerboard: volumes must share a grid");
    }
    if (tile < 1) throw std::invalid_argument("checkerboard: tile must be >= 1");
    if (slice_axis < 0 || slice_axis > 2) {
        throw std::invalid_argument("checkerboard: slice axis must be 0, 1 or 2");
    }
    if (channel < 0 || channel >= a.channels() || channel >= b.channels()) {
        throw std::invalid_argument("checkerboard: channel out of range");
    }
    const int3 d = a.dims();
    int extent = slice_axis == 0 ? d.x : (slice_axis == 1 ? d.y : d.z);
    if (slice_index < 0 || slice_index >= extent) {
        throw std::invalid_argument("checkerboard: slice index out of range");
    }

    RgbImage img;
    if (slice_axis == 2) {
        img.width = d.x;
        img.height = d.y;
    } else if (slice_axis == 1) {
        img.width = d.x;
        img.height = d.z;
    } else {
        img.width = d.y;
        img.height = d.z;
    }
    img.pixels.assign((std::size_t)img.width * img.height * 3, 0);

    MinMax ra = value_range(a, channel);
    MinMax rb = value_range(b, channel);

    auto voxel = [&](const Volume& v, int i, int j) {
        if (slice_axis == 2) return v.at(i, j, slice_index, channel);
        if (slice_axis == 1) return v.at(i, slice_index, j, channel);
        return v.at(slice_index, i, j, channel);
    };

    for (int j = 0; j < img.height; ++j) {
        for (int i = 0; i < img.width; ++i) {
            bool use_a = ((i / tile) + (j / tile)) % 2 == 0;
            uint8_t* px = img.pixels.data() + ((std::size_t)j * img.width + i) * 3;
            if (use_a) {
                uint8_t g = to_byte(voxel(a, i, j), ra);
                px[0] = g;
                px[1] = g;
                px[2] = g;
            } else {
                px[0] = to_byte(voxel(b, i, j), rb);
                px[1] = 0;
                px[2] = 0;
            }
        }
    }
    return img;
}

} // namespace blockreg
