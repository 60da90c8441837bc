#include "plcrf/pose_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plcrf/errors.hpp"

namespace plcrf {

namespace {

using nlohmann::json;

template <typename Record>
std::string format_records(const std::vector<Record>& records) {
    std::string out;
    for (const auto& r : records) {
        json joints = json::array();
        for (const auto& p : r.pose.joints) {
            json coords = json::array();
            for (Eigen::Index k = 0; k < p.size(); ++k) coords.push_back(p[k]);
            joints.push_back(std::move(coords));
        }
        json line = {{"frame", r.frame}, {"joints", std::move(joints)}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

template <typename Record, int Dim>
std::vector<Record> parse_records(const std::string& text) {
    std::vector<Record> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            Record r;
            r.frame = j.at("frame").get<std::int64_t>();
            for (const auto& coords : j.at("joints")) {
                if (coords.size() != Dim) {
                    throw DataError("expected " + std::to_string(Dim) + " coordinates per joint");
                }
                Eigen::Matrix<double, Dim, 1> p;
                for (int k = 0; k < Dim; ++k) p[k] = coords.at(k).get<double>();
                if (!p.allFinite()) throw DataError("non-finite coordinate");
                r.pose.joints.push_back(p);
            }
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw FormatError("pose file line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw FormatError("pose file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::string format_poses(const std::vector<FramePose2D>& records) { return format_records(records); }
std::string format_poses(const std::vector<FramePose3D>& records) { return format_records(records); }

std::vector<FramePose2D> parse_poses_2d(const std::string& text) { return parse_records<FramePose2D, 2>(text); }
std::vector<FramePose3D> parse_poses_3d(const std::string& text) { return parse_records<FramePose3D, 3>(text); }

std::vector<FramePose2D> read_poses_2d(const std::filesystem::path& path) { return parse_poses_2d(read_file(path)); }
std::vector<FramePose3D> read_poses_3d(const std::filesystem::path& path) { return parse_poses_3d(read_file(path)); }

void write_poses(const std::filesystem::path& path, const std::vector<FramePose2D>& records) {
    write_file_atomic(path, format_poses(records));
}

void write_poses(const std::filesystem::path& path, const std::vector<FramePose3D>& records) {
    write_file_atomic(path, format_poses(records));
}

std::string format_boxes(const std::vector<FrameBox>& records) {
    std::string out;
    for (const auto& r : records) {
        const json line = {{"frame", r.frame}, {"origin", {r.box.origin.x(), r.box.origin.y()}}, {"side", r.box.side}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<FrameBox> parse_boxes(const std::string& text) {
    std::vector<FrameBox> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            FrameBox r;
            r.frame = j.at("frame").get<std::int64_t>();
            const auto& origin = j.at("origin");
            if (origin.size() != 2) throw DataError("origin needs 2 coordinates");
            r.box.origin = Point2(origin.at(0).get<double>(), origin.at(1).get<double>());
            r.box.side = j.at("side").get<double>();
            r.box.validate();
            out.push_back(r);
        } catch (const json::exception& e) {
            throw FormatError("box file line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw FormatError("box file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<FrameBox> read_boxes(const std::filesystem::path& path) { return parse_boxes(read_file(path)); }

void write_boxes(const std::filesystem::path& path, const std::vector<FrameBox>& records) {
    write_file_atomic(path, format_boxes(records));
}

std::string format_camera(const CameraModel& camera) {
    const json j = {{"fx", camera.fx}, {"fy", camera.fy}, {"cx", camera.cx}, {"cy", camera.cy}};
    return j.dump() + "\n";
}

CameraModel parse_camera(const std::string& text) {
    CameraModel camera;
    try {
        const json j = json::parse(text);
        for (const auto& [key, value] : j.items()) {
            if (key != "fx" && key != "fy" && key != "cx" && key != "cy") {
                throw FormatError("camera file: unknown key '" + key + "'");
            }
        }
        camera.fx = j.at("fx").get<double>();
        camera.fy = j.at("fy").get<double>();
        camera.cx = j.at("cx").get<double>();
        camera.cy = j.at("cy").get<double>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("camera file: ") + e.what());
    }
    camera.validate();
    return camera;
}

CameraModel read_camera(const std::filesystem::path& path) { return parse_camera(read_file(path)); }

void write_camera(const std::filesystem::path& path, const CameraModel& camera) {
    write_file_atomic(path, format_camera(camera));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

}  // namespace plcrf
