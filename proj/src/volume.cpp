#include "blockreg/volume.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace blockreg {

void GridMeta::validate() const {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1) {
        throw std::invalid_argument("GridMeta: all dims must be >= 1");
    }
    if (!(spacing.x > 0.0) || !(spacing.y > 0.0) || !(spacing.z > 0.0)) {
        throw std::invalid_argument("GridMeta: all spacings must be > 0");
    }
    if (channels < 1) {
        throw std::invalid_argument("GridMeta: channels must be >= 1");
    }
    // The row kernels index with int32.
    if (value_count() > (std::size_t)INT32_MAX) {
        throw std::invalid_argument("GridMeta: volume exceeds the supported size (2^31 values)");
    }
}

Volume::Volume(const GridMeta& meta, float fill) : _meta(meta) {
    _meta.validate();
    _data.assign(_meta.value_count(), fill);
}

Volume::Volume(const GridMeta& meta, std::vector<float> data) : _meta(meta), _data(std::move(data)) {
    _meta.validate();
    if (_data.size() != _meta.value_count()) {
        throw std::invalid_argument("Volume: data length does not match dims*channels");
    }
}

bool Volume::all_finite() const {
    for (float v : _data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DisplacementField::DisplacementField(const int3& dims) {
    _meta.dims = dims;
    _meta.channels = 3;
    _meta.validate();
    _data.assign(_meta.value_count(), 0.0f);
}

DisplacementField::DisplacementField(const int3& dims, std::vector<float> data) : _data(std::move(data)) {
    _meta.dims = dims;
    _meta.channels = 3;
    _meta.validate();
    if (_data.size() != _meta.value_count()) {
        throw std::invalid_argument("DisplacementField: data length does not match 3*voxel count");
    }
}

bool DisplacementField::all_finite() const {
    for (float v : _data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace blockreg
