#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plcrf/geometry.hpp"

namespace plcrf {

struct FramePose2D {
    std::int64_t frame = 0;
    Pose2D pose;
};

struct FramePose3D {
    std::int64_t frame = 0;
    Pose3D pose;
};

// Line-delimited JSON, one {"frame": n, "joints": [[x, y], ...]} per line.
std::string format_poses(const std::vector<FramePose2D>& records);
std::string format_poses(const std::vector<FramePose3D>& records);

std::vector<FramePose2D> parse_poses_2d(const std::string& text);
std::vector<FramePose3D> parse_poses_3d(const std::string& text);

std::vector<FramePose2D> read_poses_2d(const std::filesystem::path& path);
std::vector<FramePose3D> read_poses_3d(const std::filesystem::path& path);

void write_poses(const std::filesystem::path& path, const std::vector<FramePose2D>& records);
void write_poses(const std::filesystem::path& path, const std::vector<FramePose3D>& records);

struct FrameBox {
    std::int64_t frame = 0;
    BoundingBox box;
};

// Line-delimited JSON, one {"frame": n, "origin": [x, y], "side": s} per line.
std::string format_boxes(const std::vector<FrameBox>& records);
std::vector<FrameBox> parse_boxes(const std::string& text);
std::vector<FrameBox> read_boxes(const std::filesystem::path& path);
void write_boxes(const std::filesystem::path& path, const std::vector<FrameBox>& records);

std::string format_camera(const CameraModel& camera);
CameraModel parse_camera(const std::string& text);
CameraModel read_camera(const std::filesystem::path& path);
void write_camera(const std::filesystem::path& path, const CameraModel& camera);

// Whole-file helpers. write_file_atomic writes to a sibling temporary and
// renames it into place, so readers never observe a partial file.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace plcrf
