#include "plcrf/heatmap_io.hpp"

#include <sstream>

#include "plcrf/binary_io.hpp"
#include "plcrf/errors.hpp"
#include "plcrf/pose_io.hpp"

namespace plcrf {

namespace {
constexpr std::string_view kMagic = "PLHM";
}

std::string encode_heatmap_volume(const HeatMapVolume& volume) {
    if (volume.maps.empty()) throw DataError("encode_heatmap_volume: empty volume");
    const int h = volume.maps.front().height();
    const int w = volume.maps.front().width();
    binary::Writer out;
    out.put_bytes(kMagic);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(volume.maps.size()));
    out.put<std::uint32_t>(static_cast<std::uint32_t>(h));
    out.put<std::uint32_t>(static_cast<std::uint32_t>(w));
    for (const auto& map : volume.maps) {
        if (map.width() != w || map.height() != h) {
            throw DimensionMismatchError("encode_heatmap_volume: grids differ in size");
        }
        for (float v : map.values()) out.put<float>(v);
    }
    out.put<double>(volume.box.origin.x());
    out.put<double>(volume.box.origin.y());
    out.put<double>(volume.box.side);
    out.put<double>(0.0);
    return out.take();
}

HeatMapVolume decode_heatmap_volume(const std::string& bytes) {
    binary::Reader in(bytes);
    if (in.get_bytes(kMagic.size()) != kMagic) throw FormatError("heat-map volume: bad magic");
    const auto joints = in.get<std::uint32_t>();
    const auto h = in.get<std::uint32_t>();
    const auto w = in.get<std::uint32_t>();
    if (joints == 0 || h == 0 || w == 0 || h > 4096 || w > 4096 || joints > 4096) {
        throw FormatError("heat-map volume: implausible dimensions");
    }
    const std::size_t cells = static_cast<std::size_t>(h) * w;
    if (in.remaining() != joints * cells * sizeof(float) + 4 * sizeof(double)) {
        throw FormatError("heat-map volume: size does not match header (truncated or corrupt)");
    }
    HeatMapVolume volume;
    volume.maps.reserve(joints);
    for (std::uint32_t j = 0; j < joints; ++j) {
        std::vector<float> values(cells);
        for (auto& v : values) v = in.get<float>();
        HeatMap map(static_cast<int>(w), static_cast<int>(h), std::move(values));
        map.clamp_negative();
        volume.maps.push_back(std::move(map));
    }
    volume.box.origin.x() = in.get<double>();
    volume.box.origin.y() = in.get<double>();
    volume.box.side = in.get<double>();
    (void)in.get<double>();
    volume.validate();
    return volume;
}

HeatMapVolume read_heatmap_volume(const std::filesystem::path& path) {
    try {
        return decode_heatmap_volume(read_file(path));
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_heatmap_volume(const std::filesystem::path& path, const HeatMapVolume& volume) {
    write_file_atomic(path, encode_heatmap_volume(volume));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::filesystem::path base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        ManifestEntry entry;
        std::string rel;
        if (!(fields >> entry.frame)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected '<frame> <path>'");
        }
        if (!(fields >> rel)) throw FormatError("manifest line " + std::to_string(line_no) + ": missing path");
        entry.volume = base / rel;
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += std::to_string(e.frame);
        out += ' ';
        out += e.volume.generic_string();
        out += '\n';
    }
    return out;
}

}  // namespace plcrf
