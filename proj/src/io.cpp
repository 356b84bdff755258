#include "blockreg/io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "volume container I/O assumes a little-endian host");

namespace blockreg::io {

namespace {

using nlohmann::json;

std::string header_path(const std::string& path) { return path + ".json"; }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("bad header '" + path + "': " + e.what());
    }
    return j;
}

std::vector<char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    in.seekg(0, std::ios::end);
    std::streamsize size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes((std::size_t)size);
    if (size > 0 && !in.read(bytes.data(), size)) {
        throw std::runtime_error("failed reading '" + path + "'");
    }
    return bytes;
}

void write_bytes(const std::string& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create '" + path + "'");
    out.write((const char*)data, (std::streamsize)size);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

json meta_header(const GridMeta& meta) {
    return json{{"dims", {meta.dims.x, meta.dims.y, meta.dims.z}},
                {"spacing", {meta.spacing.x, meta.spacing.y, meta.spacing.z}},
                {"channels", meta.channels},
                {"dtype", "f32"},
                {"byte_order", "little"}};
}

GridMeta parse_header(const json& j, const std::string& path) {
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("bad header '" + header_path(path) + "': " + msg);
    };
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3) fail("dims");
    if (!j.contains("channels")) fail("channels");
    if (j.value("dtype", "") != "f32") fail("unsupported dtype (expected f32)");
    if (j.value("byte_order", "") != "little") fail("unsupported byte order (expected little)");
    GridMeta meta;
    meta.dims = {j["dims"][0].get<int>(), j["dims"][1].get<int>(), j["dims"][2].get<int>()};
    if (j.contains("spacing")) {
        if (!j["spacing"].is_array() || j["spacing"].size() != 3) fail("spacing");
        meta.spacing = {j["spacing"][0].get<double>(), j["spacing"][1].get<double>(),
                        j["spacing"][2].get<double>()};
    }
    meta.channels = j["channels"].get<int>();
    try {
        meta.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    return meta;
}

std::vector<float> parse_payload(const std::string& path, const GridMeta& meta) {
    std::vector<char> bytes = read_bytes(path);
    std::size_t expected = meta.value_count() * 4;
    if (bytes.size() != expected) {
        throw std::runtime_error("size mismatch in '" + path + "': header implies " +
                                 std::to_string(expected) + " bytes, payload has " +
                                 std::to_string(bytes.size()));
    }
    std::vector<float> values(meta.value_count());
    std::memcpy(values.data(), bytes.data(), bytes.size());
    for (float v : values) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("non-finite value in '" + path + "'");
        }
    }
    return values;
}

} // namespace

void write_volume(const std::string& path, const Volume& vol) {
    write_text(header_path(path), meta_header(vol.meta()).dump(2) + "\n");
    write_bytes(path, vol.data(), vol.size() * 4);
}

Volume read_volume(const std::string& path) {
    GridMeta meta = parse_header(read_json_file(header_path(path)), path);
    return Volume(meta, parse_payload(path, meta));
}

void write_field(const std::string& path, const DisplacementField& field) {
    write_text(header_path(path), meta_header(field.meta()).dump(2) + "\n");
    write_bytes(path, field.data(), field.size() * 4);
}

DisplacementField read_field(const std::string& path) {
    GridMeta meta = parse_header(read_json_file(header_path(path)), path);
    if (meta.channels != 3) {
        throw std::runtime_error("'" + path + "' is not a displacement field (channels != 3)");
    }
    return DisplacementField(meta.dims, parse_payload(path, meta));
}

void write_ppm(const std::string& path, const RgbImage& img) {
    std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create '" + path + "'");
    out.write(header.data(), (std::streamsize)header.size());
    out.write((const char*)img.pixels.data(), (std::streamsize)img.pixels.size());
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

uint64_t fnv1a64(const void* data, std::size_t size) {
    const unsigned char* p = (const unsigned char*)data;
    uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

json input_json(const InputRecord& rec) {
    return json{{"path", rec.path},
                {"fnv1a64", rec.hash},
                {"dims", {rec.dims.x, rec.dims.y, rec.dims.z}},
                {"channels", rec.channels}};
}

json config_json(const RegistrationConfig& config) {
    return json{{"epsilon", config.epsilon},
                {"levels", config.levels},
                {"alpha", config.alpha},
                {"tolerance", config.tolerance},
                {"block_size", config.block_size},
                {"threads", config.worker_count},
                {"early_termination", config.early_termination},
                {"max_sweeps", config.max_sweeps}};
}

json level_json(const LevelReport& report) {
    json trace = json::array();
    for (const SweepStats& s : report.trace) {
        trace.push_back(json{{"sweep", s.sweep},
                             {"energy", s.energy},
                             {"accepted", s.accepted},
                             {"evaluated", s.evaluated},
                             {"skipped", s.skipped},
                             {"seconds", s.seconds}});
    }
    return json{{"level", report.level},
                {"dims", {report.dims.x, report.dims.y, report.dims.z}},
                {"initial_energy", report.initial_energy},
                {"final_energy", report.final_energy},
                {"sweeps", report.sweeps},
                {"moves_accepted", report.moves_accepted},
                {"blocks_evaluated", report.blocks_evaluated},
                {"blocks_skipped", report.blocks_skipped},
                {"converged", report.converged},
                {"seconds", report.seconds},
                {"trace", trace}};
}

json run_manifest(const RegistrationConfig& config, const RunReport& report,
                  const std::string& mode, const std::vector<InputRecord>& inputs,
                  const std::vector<InputRecord>& outputs, std::optional<double> vme_value) {
    json levels = json::array();
    for (const LevelReport& lr : report.levels) levels.push_back(level_json(lr));
    json in = json::object();
    for (const InputRecord& rec : inputs) in[rec.path] = input_json(rec);
    json out = json::object();
    for (const InputRecord& rec : outputs) out[rec.path] = input_json(rec);
    json j{{"version", "0.1.0"},
           {"mode", mode},
           {"config", config_json(config)},
           {"inputs", in},
           {"outputs", out},
           {"levels", levels},
           {"final_energy", report.final_energy},
           {"total_seconds", report.total_seconds}};
    if (vme_value) j["vme"] = *vme_value;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    write_bytes(path, text.data(), text.size());
}

std::string read_text(const std::string& path) {
    std::vector<char> bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

} // namespace blockreg::io
