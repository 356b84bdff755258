#include "blockreg/phantom.h"

#include "blockreg/volume_ops.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace blockreg {

namespace {

// Uniform doubles derived from raw engine output; keeps generation stable
// across standard library implementations.
double u01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * u01(rng);
}

struct Blob {
    double3 center;
    double sigma;
    double amp;
};

std::vector<Blob> draw_blobs(std::mt19937_64& rng, const int3& dims, int count,
                             double sigma_lo, double sigma_hi, double amp_lo, double amp_hi) {
    std::vector<Blob> blobs(count);
    for (Blob& b : blobs) {
        b.center = {uniform(rng, 0.0, dims.x - 1.0), uniform(rng, 0.0, dims.y - 1.0),
                    uniform(rng, 0.0, dims.z - 1.0)};
        b.sigma = uniform(rng, sigma_lo, sigma_hi);
        double mag = uniform(rng, amp_lo, amp_hi);
        b.amp = u01(rng) < 0.5 ? -mag : mag;
    }
    return blobs;
}

double blob_sum(const std::vector<Blob>& blobs, double x, double y, double z) {
    double acc = 0.0;
    for (const Blob& b : blobs) {
        double dx = x - b.center.x;
        double dy = y - b.center.y;
        double dz = z - b.center.z;
        double r2 = (dx * dx + dy * dy) + dz * dz;
        acc += b.amp * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
    }
    return acc;
}

Volume textured_volume(std::mt19937_64& rng, const int3& dims, int channels) {
    int min_dim = std::min({dims.x, dims.y, dims.z});
    double denom = std::max(1, dims.x + dims.y + dims.z - 3);

    GridMeta meta;
    meta.dims = dims;
    meta.channels = channels;
    Volume vol(meta);
    for (int c = 0; c < channels; ++c) {
        // Structure at several scales, the way anatomy has organs, tissue
        // interfaces and texture: coarse pyramid levels still see edges, and
        // fine levels have local detail to lock on to.
        std::vector<Blob> blobs;
        auto add = [&](int count, double slo, double shi, double alo, double ahi) {
            auto more = draw_blobs(rng, dims, count, slo, shi, alo, ahi);
            blobs.insert(blobs.end(), more.begin(), more.end());
        };
        add(4, std::max(2.5, min_dim / 4.0), std::max(3.0, min_dim / 2.5), 1.2, 2.2);
        add(16, std::max(1.5, min_dim / 10.0), std::max(2.0, min_dim / 6.0), 1.0, 2.0);
        add(std::max(30, (int)(dims.x * dims.y * dims.z / 120)), 1.0, 2.0, 1.0, 2.0);

        bool ascending = c % 2 == 0;
        for (int z = 0; z < dims.z; ++z) {
            for (int y = 0; y < dims.y; ++y) {
                for (int x = 0; x < dims.x; ++x) {
                    double ramp = 0.7 * (double)(x + y + z) / denom;
                    double base = ascending ? 0.15 + ramp : 0.85 - ramp;
                    vol.at(x, y, z, c) = (float)(base + blob_sum(blobs, x, y, z));
                }
            }
        }
    }
    return vol;
}

DisplacementField smooth_field(std::mt19937_64& rng, const int3& dims, double amplitude) {
    int min_dim = std::min({dims.x, dims.y, dims.z});

    // Global drift plus medium-wavelength local deformation.
    std::vector<Blob> comp_blobs[3];
    for (auto& blobs : comp_blobs) {
        blobs = draw_blobs(rng, dims, 3, std::max(2.0, min_dim / 5.0),
                           std::max(3.0, min_dim / 2.5), 0.5, 1.0);
        auto local = draw_blobs(rng, dims, 4, std::max(1.5, min_dim / 10.0),
                                std::max(2.5, min_dim / 5.0), 0.2, 0.5);
        blobs.insert(blobs.end(), local.begin(), local.end());
    }

    DisplacementField field(dims);
    double max_norm = 0.0;
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x) {
                double3 v{blob_sum(comp_blobs[0], x, y, z), blob_sum(comp_blobs[1], x, y, z),
                          blob_sum(comp_blobs[2], x, y, z)};
                field.set(x, y, z, v);
                max_norm = std::max(max_norm, norm(v));
            }
        }
    }
    if (max_norm > 0.0) {
        double scale = amplitude / max_norm;
        for (int z = 0; z < dims.z; ++z) {
            for (int y = 0; y < dims.y; ++y) {
                for (int x = 0; x < dims.x; ++x) {
                    field.set(x, y, z, scale * field.get(x, y, z));
                }
            }
        }
    }
    return field;
}

} // namespace

PhantomKind phantom_kind_from_string(const std::string& name) {
    if (name == "constant-shift") return PhantomKind::ConstantShift;
    if (name == "smooth-warp") return PhantomKind::SmoothWarp;
    if (name == "two-channel-blob") return PhantomKind::TwoChannelBlob;
    throw std::invalid_argument("unknown phantom kind '" + name +
                                "' (expected constant-shift, smooth-warp or two-channel-blob)");
}

std::string to_string(PhantomKind kind) {
    switch (kind) {
    case PhantomKind::ConstantShift: return "constant-shift";
    case PhantomKind::SmoothWarp: return "smooth-warp";
    case PhantomKind::TwoChannelBlob: return "two-channel-blob";
    }
    return "?";
}

PhantomResult make_phantom(const PhantomSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    PhantomResult result;

    switch (spec.kind) {
    case PhantomKind::ConstantShift: {
        result.source = textured_volume(rng, spec.dims, 1);
        result.ground_truth = DisplacementField(spec.dims);
        for (int z = 0; z < spec.dims.z; ++z) {
            for (int y = 0; y < spec.dims.y; ++y) {
                for (int x = 0; x < spec.dims.x; ++x) {
                    result.ground_truth.set(x, y, z, spec.shift);
                }
            }
        }
        break;
    }
    case PhantomKind::SmoothWarp: {
        result.source = textured_volume(rng, spec.dims, 1);
        result.ground_truth = smooth_field(rng, spec.dims, spec.amplitude);
        break;
    }
    case PhantomKind::TwoChannelBlob: {
        result.source = textured_volume(rng, spec.dims, 2);
        result.ground_truth = smooth_field(rng, spec.dims, spec.amplitude);
        break;
    }
    }

    result.target = warp(result.source, result.ground_truth);
    return result;
}

} // namespace blockreg
