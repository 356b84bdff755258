#include "blockreg/volume_ops.h"

#include "blockreg/detail/interp.h"
#include "blockreg/kernels.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace blockreg {

namespace {

// exp(-k^2/2) for k in [-2,2], normalized; frozen so results do not depend on
// the platform's libm.
constexpr double kGauss5[5] = {
    0x1.be5f0dc491a0ep-5, // 0.054488684549642945
    0x1.f41fd54c58785p-3, // 0.24420134200323332
    0x1.9c486742831f6p-2, // 0.4026199468942475
    0x1.f41fd54c58785p-3,
    0x1.be5f0dc491a0ep-5,
};

// Renormalized truncated tap for border elements. Taps k in [kmin,kmax]
// relative to position p; `value(k)` fetches the sample.
template <typename F>
float truncated_tap(int p, int n, F&& value) {
    int kmin = p - 2 < 0 ? -p : -2;
    int kmax = p + 2 > n - 1 ? (n - 1) - p : 2;
    double num = 0.0;
    double den = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        num += kGauss5[k + 2] * value(k);
        den += kGauss5[k + 2];
    }
    return (float)(num / den);
}

// One blur pass along `axis` (0=x, 1=y, 2=z). Interior elements go through
// the dispatched 5-tap kernel; truncated borders are handled here.
Volume blur_axis(const Volume& in, int axis) {
    const int3 d = in.dims();
    const int nc = in.channels();
    const int n_axis = axis == 0 ? d.x : (axis == 1 ? d.y : d.z);
    Volume out(in.meta());
    const auto& kern = kernels::active();
    const float* src = in.data();
    float* dst = out.data();

    if (axis == 0) {
        for (int z = 0; z < d.z; ++z) {
            for (int y = 0; y < d.y; ++y) {
                const float* row = src + in.index(0, y, z);
                float* orow = dst + in.index(0, y, z);
                int lo = 2;         // first interior x
                int hi = d.x - 2;   // one past last interior x
                if (hi > lo) {
                    const float* base = row + (lo - 2) * nc;
                    kern.blur5_rows(base, base + nc, base + 2 * nc, base + 3 * nc,
                                    base + 4 * nc, kGauss5, orow + lo * nc, (hi - lo) * nc);
                }
                for (int x = 0; x < d.x; ++x) {
                    if (x >= lo && x < hi) continue;
                    for (int c = 0; c < nc; ++c) {
                        orow[x * nc + c] = truncated_tap(
                            x, d.x, [&](int k) { return (double)row[(x + k) * nc + c]; });
                    }
                }
            }
        }
        return out;
    }

    const int row_len = d.x * nc;
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            float* orow = dst + in.index(0, y, z);
            int p = axis == 1 ? y : z;
            if (p >= 2 && p + 2 <= n_axis - 1) {
                auto row_at = [&](int k) {
                    return axis == 1 ? src + in.index(0, y + k, z) : src + in.index(0, y, z + k);
                };
                kern.blur5_rows(row_at(-2), row_at(-1), row_at(0), row_at(1), row_at(2),
                                kGauss5, orow, row_len);
            } else {
                for (int j = 0; j < row_len; ++j) {
                    orow[j] = truncated_tap(p, n_axis, [&](int k) {
                        const float* r = axis == 1 ? src + in.index(0, y + k, z)
                                                   : src + in.index(0, y, z + k);
                        return (double)r[j];
                    });
                }
            }
        }
    }
    return out;
}

int3 half_dims(const int3& d) {
    return {(d.x + 1) / 2, (d.y + 1) / 2, (d.z + 1) / 2};
}

} // namespace

double sample_trilinear(const Volume& vol, const double3& p, int channel) {
    if (channel < 0 || channel >= vol.channels()) {
        throw std::invalid_argument("sample_trilinear: channel index out of range");
    }
    const int3 d = vol.dims();
    return detail::sample_one(vol.data(), d.x, d.y, d.z, vol.channels(), p.x, p.y, p.z, channel);
}

Volume warp(const Volume& source, const DisplacementField& field) {
    const int3 d = field.dims();
    const int nc = source.channels();
    GridMeta out_meta;
    out_meta.dims = d;
    out_meta.spacing = field.meta().spacing;
    out_meta.channels = nc;
    Volume out(out_meta);

    const auto& kern = kernels::active();
    const int3 sd = source.dims();
    std::vector<double> row((std::size_t)d.x * nc);
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            const float* disp = field.data() + field.vector_index(0, y, z);
            kern.warp_row(source.data(), sd.x, sd.y, sd.z, nc, disp,
                          0.0, (double)y, (double)z, 1.0, 0.0, 0.0, 0.0,
                          row.data(), d.x);
            float* orow = out.data() + out.index(0, y, z);
            for (int j = 0; j < d.x * nc; ++j) orow[j] = (float)row[j];
        }
    }
    return out;
}

DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner) {
    if (!(outer.meta().dims == inner.meta().dims)) {
        throw std::invalid_argument("compose: fields must share a grid");
    }
    const int3 d = inner.dims();
    DisplacementField out(d);
    const auto& kern = kernels::active();
    std::vector<double> row((std::size_t)d.x * 3);
    for (int z = 0; z < d.z; ++z) {
        for (int y = 0; y < d.y; ++y) {
            const float* disp = inner.data() + inner.vector_index(0, y, z);
            kern.warp_row(outer.data(), d.x, d.y, d.z, 3, disp,
                          0.0, (double)y, (double)z, 1.0, 0.0, 0.0, 0.0,
                          row.data(), d.x);
            float* orow = out.data() + out.vector_index(0, y, z);
            for (int j = 0; j < d.x * 3; ++j) {
                orow[j] = (float)((double)disp[j] + row[j]);
            }
        }
    }
    return out;
}

Volume gaussian_downsample(const Volume& vol) {
    const int3 d = vol.dims();
    if (d.x < 2 || d.y < 2 || d.z < 2) {
        throw std::invalid_argument("gaussian_downsample: every dim must be >= 2");
    }
    Volume blurred = blur_axis(blur_axis(blur_axis(vol, 0), 1), 2);

    GridMeta meta;
    meta.dims = half_dims(d);
    meta.spacing = {vol.meta().spacing.x * 2.0, vol.meta().spacing.y * 2.0,
                    vol.meta().spacing.z * 2.0};
    meta.channels = vol.channels();
    Volume out(meta);
    const int nc = vol.channels();
    for (int z = 0; z < meta.dims.z; ++z) {
        for (int y = 0; y < meta.dims.y; ++y) {
            for (int x = 0; x < meta.dims.x; ++x) {
                for (int c = 0; c < nc; ++c) {
                    out.at(x, y, z, c) = blurred.at(2 * x, 2 * y, 2 * z, c);
                }
            }
        }
    }
    return out;
}

DisplacementField upsample_field(const DisplacementField& field, const GridMeta& target_meta) {
    target_meta.validate();
    const int3 s = field.dims();
    const int3 t = target_meta.dims;
    if (!(half_dims(t) == s)) {
        throw std::invalid_argument(
            "upsample_field: target dims are not the recorded 2x refinement of the source");
    }
    DisplacementField out(t);
    const auto& kern = kernels::active();
    std::vector<double> row((std::size_t)t.x * 3);
    for (int z = 0; z < t.z; ++z) {
        for (int y = 0; y < t.y; ++y) {
            kern.warp_row(field.data(), s.x, s.y, s.z, 3, nullptr,
                          0.0, (double)y * 0.5, (double)z * 0.5, 0.5, 0.0, 0.0, 0.0,
                          row.data(), t.x);
            float* orow = out.data() + out.vector_index(0, y, z);
            for (int j = 0; j < t.x * 3; ++j) {
                orow[j] = (float)(2.0 * row[j]);
            }
        }
    }
    return out;
}

DisplacementField downsample_field(const DisplacementField& field) {
    GridMeta meta = field.meta();
    Volume as_volume(meta, std::vector<float>(field.data(), field.data() + field.size()));
    Volume down = gaussian_downsample(as_volume);
    std::vector<float> data(down.values());
    for (float& v : data) v = (float)((double)v * 0.5);
    return DisplacementField(down.dims(), std::move(data));
}

Pyramid build_pyramid(const Volume& base, int level_count) {
    if (level_count < 1) {
        throw std::invalid_argument("build_pyramid: level count must be >= 1");
    }
    Pyramid pyr;
    pyr.levels.push_back(base);
    for (int l = 1; l < level_count; ++l) {
        const int3 d = pyr.levels.back().dims();
        if (d.x < 2 || d.y < 2 || d.z < 2) {
            throw std::invalid_argument(
                "build_pyramid: dims too small for " + std::to_string(level_count) +
                " levels; use a smaller level count");
        }
        pyr.levels.push_back(gaussian_downsample(pyr.levels.back()));
    }
    return pyr;
}

} // namespace blockreg
