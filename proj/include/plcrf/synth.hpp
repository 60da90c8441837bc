#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "plcrf/geometry.hpp"
#include "plcrf/heatmap.hpp"

namespace plcrf {

struct AngleRange {
    double min = 0.0;
    double max = 0.0;
};

// Kinematic tree. Joint j != root hangs off parents[j] through a bone of
// bone_lengths[j] mm along rest_directions[j] (body frame: x to the subject's
// left, y up, z forward). ranges[j] bound the local rotation of that bone
// about the body x, y and z axes, applied as Rz * Rx * Ry. For the root the
// ranges are the global orientation.
struct SkeletonSpec {
    std::vector<std::string> names;
    std::vector<int> parents;
    std::vector<double> bone_lengths;
    std::vector<Point3> rest_directions;
    std::vector<std::array<AngleRange, 3>> ranges;

    std::size_t joint_count() const { return parents.size(); }
    std::size_t root() const;
    double mean_bone_length() const;

    void validate() const;

    // 17 joints in Human3.6M order: pelvis, right leg, left leg, spine,
    // thorax, neck, head, left arm, right arm. Angle ranges describe upright
    // everyday poses (any facing direction, moderate limb motion).
    static SkeletonSpec human17();
};

// Forward kinematics with uniformly drawn angles. The root sits at the
// origin and the result is in the body frame.
Pose3D sample_pose(const SkeletonSpec& spec, std::uint64_t seed);

// Rest pose (all angles zero).
Pose3D rest_pose(const SkeletonSpec& spec);

// Subject placement in front of the camera. Body frame to camera frame is a
// half turn about x (body up maps to -Y, body forward faces the camera).
struct SceneSpec {
    CameraModel camera;
    double min_depth = 3000.0;
    double max_depth = 6000.0;
    // Root offset from the optical axis, as a fraction of depth.
    double lateral_fraction = 0.3;
    double vertical_fraction = 0.1;
};

Pose3D place_subject(const Pose3D& body_pose, const Point3& root_position);

struct BoxPolicy {
    double margin = 0.15;  // side = (1 + margin) * larger extent
    int grid_size = 32;
    double sigma = 1.0;    // ground-truth Gaussian width, grid pixels
};

BoundingBox tight_box(const Pose2D& pose, double margin);

struct CorruptionSpec {
    double distractor_probability = 0.0;
    // Distractor distance from the true joint, grid pixels.
    double min_offset = 6.0;
    double max_offset = 12.0;
    // Distractor peak relative to the true peak.
    double strength = 1.1;
    // Uniform noise in [0, noise_floor) added to every pixel.
    double noise_floor = 0.0;

    void validate() const;
};

struct SyntheticFrame {
    std::int64_t frame = 0;
    HeatMapVolume volume;
    Pose2D pose2d;       // original-image pixels
    Pose2D grid_pose2d;  // heat-map grid coordinates
    Pose3D pose3d;       // camera coordinates, mm
    std::vector<bool> corrupted;
};

// Projects the pose, boxes it, renders one Gaussian per joint and applies the
// corruption. Distractors are centered on pixel centers and combined with the
// true bump by maximum, so a strength > 1 always wins the global maximum.
SyntheticFrame make_frame(const Pose3D& pose, const CameraModel& camera, const BoxPolicy& box_policy,
                          const CorruptionSpec& corruption, std::uint64_t seed);

// Independent per-purpose seeds derived from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index);

struct DatasetSpec {
    SkeletonSpec skeleton = SkeletonSpec::human17();
    SceneSpec scene;
    BoxPolicy box;
    CorruptionSpec corruption;
};

// Pose in camera coordinates for item `index` of a seeded stream.
Pose3D sample_scene_pose(const DatasetSpec& spec, std::uint64_t seed, std::uint64_t index);

SyntheticFrame generate_frame(const DatasetSpec& spec, std::uint64_t seed, std::uint64_t index);

}  // namespace plcrf
