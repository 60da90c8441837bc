#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plcrf/heatmap.hpp"

namespace plcrf {

// Binary volume: "PLHM", uint32 M, H, W, M*H*W float32 (joint-major,
// row-major), then float64 origin x, origin y, side, reserved. Little-endian.
std::string encode_heatmap_volume(const HeatMapVolume& volume);

// Negative values are clamped to zero on load; the result is validated.
HeatMapVolume decode_heatmap_volume(const std::string& bytes);

HeatMapVolume read_heatmap_volume(const std::filesystem::path& path);
void write_heatmap_volume(const std::filesystem::path& path, const HeatMapVolume& volume);

struct ManifestEntry {
    std::int64_t frame = 0;
    std::filesystem::path volume;  // resolved against the manifest directory
};

// Text manifest: one "<frame> <relative path>" per line; '#' starts a comment.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
std::string format_manifest(const std::vector<ManifestEntry>& entries);

}  // namespace plcrf
