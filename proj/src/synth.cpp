#include "plcrf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "plcrf/errors.hpp"

namespace plcrf {

namespace {

Eigen::Matrix3d local_rotation(double ax, double ay, double az) {
    return (Eigen::AngleAxisd(az, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()) *
            Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()))
        .toRotationMatrix();
}

Pose3D forward_kinematics(const SkeletonSpec& spec, const std::vector<std::array<double, 3>>& angles) {
    const std::size_t n = spec.joint_count();
    std::vector<Eigen::Matrix3d> global(n);
    Pose3D pose;
    pose.joints.assign(n, Point3::Zero());
    // Parents precede children (checked by validate()).
    for (std::size_t j = 0; j < n; ++j) {
        const Eigen::Matrix3d local = local_rotation(angles[j][0], angles[j][1], angles[j][2]);
        const int parent = spec.parents[j];
        if (parent < 0) {
            global[j] = local;
            pose.joints[j] = Point3::Zero();
            continue;
        }
        const auto p = static_cast<std::size_t>(parent);
        global[j] = global[p] * local;
        pose.joints[j] = pose.joints[p] + global[j] * (spec.bone_lengths[j] * spec.rest_directions[j]);
    }
    return pose;
}

}  // namespace

std::size_t SkeletonSpec::root() const {
    for (std::size_t j = 0; j < parents.size(); ++j) {
        if (parents[j] < 0) return j;
    }
    throw DataError("skeleton: no root joint");
}

double SkeletonSpec::mean_bone_length() const {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < parents.size(); ++j) {
        if (parents[j] < 0) continue;
        total += bone_lengths[j];
        ++count;
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

void SkeletonSpec::validate() const {
    const std::size_t n = parents.size();
    if (n < 2) throw DataError("skeleton: need at least two joints");
    if (bone_lengths.size() != n || rest_directions.size() != n || ranges.size() != n ||
        (!names.empty() && names.size() != n)) {
        throw DimensionMismatchError("skeleton: per-joint arrays differ in length");
    }
    std::size_t roots = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (parents[j] < 0) {
            ++roots;
            continue;
        }
        if (static_cast<std::size_t>(parents[j]) >= j) {
            throw DataError("skeleton: parents must precede children (joint " + std::to_string(j) + ")");
        }
        if (!(bone_lengths[j] > 0.0)) throw DataError("skeleton: bone lengths must be positive");
        if (std::abs(rest_directions[j].norm() - 1.0) > 1e-9) {
            throw DataError("skeleton: rest directions must be unit vectors");
        }
    }
    if (roots != 1) throw DataError("skeleton: exactly one root required");
    for (const auto& r : ranges) {
        for (const auto& a : r) {
            if (!(a.min <= a.max)) throw DataError("skeleton: angle range min exceeds max");
        }
    }
}

SkeletonSpec SkeletonSpec::human17() {
    using R = AngleRange;
    constexpr double pi = std::numbers::pi;
    const Point3 left(1, 0, 0), right(-1, 0, 0), up(0, 1, 0), down(0, -1, 0);
    const Point3 neck = Point3(0, 1, 0.25).normalized();

    SkeletonSpec s;
    // name, parent, length, direction, ranges about (x, y, z)
    auto add = [&](std::string name, int parent, double length, Point3 dir, std::array<AngleRange, 3> r) {
        s.names.push_back(std::move(name));
        s.parents.push_back(parent);
        s.bone_lengths.push_back(length);
        s.rest_directions.push_back(dir);
        s.ranges.push_back(r);
    };
    add("pelvis", -1, 0.0, Point3(0, 1, 0), {R{-0.05, 0.05}, R{-pi, pi}, R{-0.03, 0.03}});
    add("r_hip", 0, 130.0, right, {R{}, R{}, R{}});
    add("r_knee", 1, 450.0, down, {R{-0.45, 0.1}, R{-0.08, 0.08}, R{-0.12, 0.04}});
    add("r_ankle", 2, 450.0, down, {R{0.0, 0.55}, R{}, R{}});
    add("l_hip", 0, 130.0, left, {R{}, R{}, R{}});
    add("l_knee", 4, 450.0, down, {R{-0.45, 0.1}, R{-0.08, 0.08}, R{-0.04, 0.12}});
    add("l_ankle", 5, 450.0, down, {R{0.0, 0.55}, R{}, R{}});
    add("spine", 0, 230.0, up, {R{-0.04, 0.16}, R{-0.1, 0.1}, R{-0.08, 0.08}});
    add("thorax", 7, 250.0, up, {R{-0.03, 0.08}, R{-0.08, 0.08}, R{-0.04, 0.04}});
    add("neck", 8, 120.0, neck, {R{-0.08, 0.14}, R{-0.16, 0.16}, R{-0.08, 0.08}});
    add("head", 9, 110.0, up, {R{-0.08, 0.08}, R{}, R{-0.05, 0.05}});
    add("l_shoulder", 8, 150.0, left, {R{}, R{}, R{-0.04, 0.04}});
    add("l_elbow", 11, 280.0, down, {R{-0.7, 0.16}, R{-0.14, 0.14}, R{-0.05, 0.45}});
    add("l_wrist", 12, 250.0, down, {R{-0.65, 0.0}, R{}, R{}});
    add("r_shoulder", 8, 150.0, right, {R{}, R{}, R{-0.04, 0.04}});
    add("r_elbow", 14, 280.0, down, {R{-0.7, 0.16}, R{-0.14, 0.14}, R{-0.45, 0.05}});
    add("r_wrist", 15, 250.0, down, {R{-0.65, 0.0}, R{}, R{}});
    return s;
}

Pose3D sample_pose(const SkeletonSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::array<double, 3>> angles(spec.joint_count());
    for (std::size_t j = 0; j < spec.joint_count(); ++j) {
        for (int a = 0; a < 3; ++a) {
            const AngleRange& r = spec.ranges[j][static_cast<std::size_t>(a)];
            // Always draw so that the stream layout does not depend on ranges.
            const double u = unit(rng);
            angles[j][static_cast<std::size_t>(a)] = r.min + u * (r.max - r.min);
        }
    }
    return forward_kinematics(spec, angles);
}

Pose3D rest_pose(const SkeletonSpec& spec) {
    spec.validate();
    return forward_kinematics(spec, std::vector<std::array<double, 3>>(spec.joint_count(), {0.0, 0.0, 0.0}));
}

Pose3D place_subject(const Pose3D& body_pose, const Point3& root_position) {
    Pose3D out;
    out.joints.reserve(body_pose.size());
    for (const auto& p : body_pose.joints) out.joints.emplace_back(p.x() + root_position.x(), -p.y() + root_position.y(), -p.z() + root_position.z());
    return out;
}

BoundingBox tight_box(const Pose2D& pose, double margin) {
    if (pose.size() == 0) throw DataError("tight_box: empty pose");
    Point2 lo = pose.joints.front();
    Point2 hi = lo;
    for (const auto& p : pose.joints) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double extent = std::max((hi - lo).maxCoeff(), 1e-6);
    BoundingBox box;
    box.side = extent * (1.0 + margin);
    box.origin = 0.5 * (lo + hi) - Point2::Constant(0.5 * box.side);
    return box;
}

void CorruptionSpec::validate() const {
    if (!(distractor_probability >= 0.0 && distractor_probability <= 1.0)) {
        throw DataError("corruption: probability must lie in [0, 1]");
    }
    if (!(strength >= 0.0)) throw DataError("corruption: strength must be non-negative");
    if (!(min_offset >= 0.0 && min_offset <= max_offset)) throw DataError("corruption: invalid offset range");
    if (!(noise_floor >= 0.0)) throw DataError("corruption: noise floor must be non-negative");
}

SyntheticFrame make_frame(const Pose3D& pose, const CameraModel& camera, const BoxPolicy& box_policy,
                          const CorruptionSpec& corruption, std::uint64_t seed) {
    corruption.validate();
    if (box_policy.grid_size < 4) throw DataError("make_frame: grid too small");
    SyntheticFrame frame;
    frame.pose3d = pose;
    frame.pose2d = project_perspective(pose, camera);
    frame.volume.box = tight_box(frame.pose2d, box_policy.margin);
    const int size = box_policy.grid_size;
    frame.grid_pose2d = image_to_crop(frame.pose2d, frame.volume.box, size);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    frame.corrupted.assign(pose.size(), false);
    frame.volume.maps.reserve(pose.size());
    for (std::size_t j = 0; j < pose.size(); ++j) {
        const Point2& center = frame.grid_pose2d.joints[j];
        HeatMap map = render_gaussian(center, size, box_policy.sigma);

        const double coin = unit(rng);
        const double radius = corruption.min_offset + unit(rng) * (corruption.max_offset - corruption.min_offset);
        const double angle = unit(rng) * 2.0 * std::numbers::pi;
        if (coin < corruption.distractor_probability && corruption.strength > 0.0) {
            // Walk the angle until the distractor lands inside the grid.
            Point2 spot = center;
            bool placed = false;
            for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
                const double a = angle + attempt * (std::numbers::pi / 8.0);
                spot = (center + radius * Point2(std::cos(a), std::sin(a))).array().round().matrix();
                placed = spot.x() >= 1 && spot.y() >= 1 && spot.x() <= size - 2 && spot.y() <= size - 2;
            }
            if (placed) {
                const HeatMap distractor = render_gaussian(spot, size, box_policy.sigma);
                for (std::size_t k = 0; k < map.values().size(); ++k) {
                    map.values()[k] = std::max(map.values()[k],
                                               static_cast<float>(corruption.strength * distractor.values()[k]));
                }
                frame.corrupted[j] = true;
            }
        }
        if (corruption.noise_floor > 0.0) {
            for (float& v : map.values()) v += static_cast<float>(corruption.noise_floor * unit(rng));
        }
        map.clamp_negative();
        frame.volume.maps.push_back(std::move(map));
    }
    return frame;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Pose3D sample_scene_pose(const DatasetSpec& spec, std::uint64_t seed, std::uint64_t index) {
    const Pose3D body = sample_pose(spec.skeleton, derive_seed(seed, 1, index));
    std::mt19937_64 rng(derive_seed(seed, 2, index));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double depth = spec.scene.min_depth + unit(rng) * (spec.scene.max_depth - spec.scene.min_depth);
    const double x = (2.0 * unit(rng) - 1.0) * spec.scene.lateral_fraction * depth;
    const double y = (2.0 * unit(rng) - 1.0) * spec.scene.vertical_fraction * depth;
    return place_subject(body, Point3(x, y, depth));
}

SyntheticFrame generate_frame(const DatasetSpec& spec, std::uint64_t seed, std::uint64_t index) {
    SyntheticFrame frame =
        make_frame(sample_scene_pose(spec, seed, index), spec.scene.camera, spec.box, spec.corruption,
                   derive_seed(seed, 3, index));
    frame.frame = static_cast<std::int64_t>(index);
    return frame;
}

}  // namespace plcrf
