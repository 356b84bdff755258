#pragma once

#include "blockreg/types.h"

#include <cstddef>
#include <vector>

namespace blockreg {

// Regular voxel grid: dims in voxels, spacing in mm per voxel, channel count.
struct GridMeta {
    int3 dims;
    double3 spacing{1.0, 1.0, 1.0};
    int channels = 1;

    friend bool operator==(const GridMeta&, const GridMeta&) = default;

    std::size_t voxel_count() const {
        return (std::size_t)dims.x * (std::size_t)dims.y * (std::size_t)dims.z;
    }
    std::size_t value_count() const { return voxel_count() * (std::size_t)channels; }

    bool same_grid(const GridMeta& other) const {
        return dims == other.dims;
    }

    void validate() const;
};

// Dense multi-channel scalar field. Linear order: x fastest, then y, then z,
// channels interleaved, i.e. index = ((z*ny + y)*nx + x)*channels + c.
class Volume {
public:
    Volume() = default;
    Volume(const GridMeta& meta, float fill = 0.0f);
    Volume(const GridMeta& meta, std::vector<float> data);

    const GridMeta& meta() const { return _meta; }
    const int3& dims() const { return _meta.dims; }
    int channels() const { return _meta.channels; }

    std::size_t index(int x, int y, int z, int c = 0) const {
        return ((std::size_t)((z * _meta.dims.y + y)) * _meta.dims.x + x) * _meta.channels + c;
    }

    float at(int x, int y, int z, int c = 0) const { return _data[index(x, y, z, c)]; }
    float& at(int x, int y, int z, int c = 0) { return _data[index(x, y, z, c)]; }

    const float* data() const { return _data.data(); }
    float* data() { return _data.data(); }
    std::size_t size() const { return _data.size(); }

    const std::vector<float>& values() const { return _data; }

    bool all_finite() const;

private:
    GridMeta _meta;
    std::vector<float> _data;
};

// Per-voxel 3-vector field u, in voxel units of its own grid. W(x) = x + u(x).
class DisplacementField {
public:
    DisplacementField() = default;
    explicit DisplacementField(const int3& dims);
    DisplacementField(const int3& dims, std::vector<float> data);

    const GridMeta& meta() const { return _meta; }
    const int3& dims() const { return _meta.dims; }

    std::size_t vector_index(int x, int y, int z) const {
        return ((std::size_t)((z * _meta.dims.y + y)) * _meta.dims.x + x) * 3;
    }

    double3 get(int x, int y, int z) const {
        std::size_t i = vector_index(x, y, z);
        return {(double)_data[i], (double)_data[i + 1], (double)_data[i + 2]};
    }
    double3 get(const int3& v) const { return get(v.x, v.y, v.z); }

    void set(int x, int y, int z, const double3& u) {
        std::size_t i = vector_index(x, y, z);
        _data[i] = (float)u.x;
        _data[i + 1] = (float)u.y;
        _data[i + 2] = (float)u.z;
    }
    void set(const int3& v, const double3& u) { set(v.x, v.y, v.z, u); }

    const float* data() const { return _data.data(); }
    float* data() { return _data.data(); }
    std::size_t size() const { return _data.size(); }

    std::size_t voxel_count() const { return _meta.voxel_count(); }

    bool all_finite() const;

    friend bool operator==(const DisplacementField& a, const DisplacementField& b) {
        return a._meta == b._meta && a._data == b._data;
    }

private:
    GridMeta _meta;
    std::vector<float> _data;
};

} // namespace blockreg
