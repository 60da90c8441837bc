#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plcrf/geometry.hpp"
#include "plcrf/heatmap.hpp"
#include "plcrf/lifter.hpp"
#include "plcrf/nbest.hpp"

namespace plcrf {

enum class PriorMode { perspective, orthographic };

struct InferenceConfig {
    double lambda = 1.0;
    double bandwidth = 3.0;
    std::size_t candidates = 128;
    PriorMode prior = PriorMode::perspective;
    CandidateGenerator generator = CandidateGenerator::mean_shift;
    int nms_upscale = 8;

    void validate() const;
    MeanShiftOptions mode_options() const;
};

struct PriorValue {
    double value = 0.0;
    Pose3D lifted;  // zero-mean
};

// Sum over joints of |x~_i - y~_i|^2 after normalizing both poses.
double normalized_discrepancy(const NormalizedPose2D& pose, const Pose2D& reprojection);

// Consistency priors for an already lifted (zero-mean) 3D pose. The
// perspective variant adds `mean_offset` before projecting.
double perspective_prior(const NormalizedPose2D& pose, const Pose3D& lifted, const Point3& mean_offset,
                         const CameraModel& camera, double lambda);
double orthographic_prior(const NormalizedPose2D& pose, const Pose3D& lifted, double lambda);

PriorValue prior_perspective(const Pose2D& pose, const LifterModel& model, const CameraModel& camera, double lambda);
PriorValue prior_orthographic(const Pose2D& pose, const LifterModel& model, double lambda);

struct PoseCandidate {
    std::vector<int> indices;
    Pose2D grid_pose;   // heat-map grid coordinates
    Pose2D pose;        // original-image pixels
    Pose3D lifted;      // zero-mean, empty if the pose could not be lifted
    double score = 0.0;
    double prior = 0.0;
    double energy = 0.0;
    bool prior_failed = false;
    std::string diagnostic;
};

struct InferenceResult {
    std::size_t best = 0;  // index into candidates
    Pose2D pose2d;         // original-image pixels
    Pose2D grid_pose2d;    // heat-map grid coordinates
    Pose3D pose3d;         // zero-mean
    Pose3D pose3d_absolute;
    std::vector<PoseCandidate> candidates;

    const PoseCandidate& winner() const { return candidates[best]; }
};

// Candidate generation, N-best enumeration, lifting and energy
// E = -S + V for every candidate, then the minimum-energy candidate (ties to
// the lower rank). Candidates whose prior cannot be evaluated get +inf energy.
InferenceResult infer(const HeatMapVolume& volume, const LifterModel& model, const InferenceConfig& config,
                      const std::optional<CameraModel>& camera = std::nullopt);

// Per-joint top-1 mode in original-image pixels.
Pose2D greedy_decode(const HeatMapVolume& volume, const InferenceConfig& config);

}  // namespace plcrf
