#pragma once

#include "blockreg/metrics.h"
#include "blockreg/optimizer.h"
#include "blockreg/volume.h"

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace blockreg::io {

// Volume container: raw little-endian f32 payload at `path`, JSON sidecar
// header at `path`.json with dims, spacing, channels, dtype and byte order.
void write_volume(const std::string& path, const Volume& vol);
Volume read_volume(const std::string& path);

// Same container with channels fixed at 3; values in voxel units.
void write_field(const std::string& path, const DisplacementField& field);
DisplacementField read_field(const std::string& path);

// Binary PPM (P6, 8-bit).
void write_ppm(const std::string& path, const RgbImage& img);

// FNV-1a content hash used to pin inputs in manifests.
uint64_t fnv1a64(const void* data, std::size_t size);
std::string hash_hex(uint64_t h);

struct InputRecord {
    std::string path;
    std::string hash;
    int3 dims;
    int channels = 0;
};

nlohmann::json input_json(const InputRecord& rec);
nlohmann::json config_json(const RegistrationConfig& config);
nlohmann::json level_json(const LevelReport& report);

// Full run manifest: config echo, inputs, per-level reports, final energy,
// optional VME, wall times, software version.
nlohmann::json run_manifest(const RegistrationConfig& config, const RunReport& report,
                            const std::string& mode, const std::vector<InputRecord>& inputs,
                            const std::vector<InputRecord>& outputs,
                            std::optional<double> vme_value = std::nullopt);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace blockreg::io
