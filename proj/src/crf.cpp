#include "plcrf/crf.hpp"

#include <cmath>
#include <limits>

#include "plcrf/errors.hpp"

namespace plcrf {

void InferenceConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DataError("inference: lambda must be finite and >= 0");
    if (!(bandwidth > 0.0)) throw DataError("inference: bandwidth must be positive");
    if (candidates == 0) throw DataError("inference: need at least one candidate");
    if (nms_upscale < 1) throw DataError("inference: NMS upscale must be >= 1");
}

MeanShiftOptions InferenceConfig::mode_options() const {
    MeanShiftOptions options;
    options.bandwidth = bandwidth;
    options.max_candidates = candidates;
    return options;
}

double normalized_discrepancy(const NormalizedPose2D& pose, const Pose2D& reprojection) {
    if (reprojection.size() != pose.joints.size()) {
        throw DimensionMismatchError("prior: reprojection joint count mismatch");
    }
    const NormalizedPose2D other = normalize_pose(reprojection);
    double total = 0.0;
    for (std::size_t i = 0; i < pose.joints.size(); ++i) total += (pose.joints[i] - other.joints[i]).squaredNorm();
    return total;
}

double perspective_prior(const NormalizedPose2D& pose, const Pose3D& lifted, const Point3& mean_offset,
                         const CameraModel& camera, double lambda) {
    if (lambda == 0.0) return 0.0;
    return lambda * normalized_discrepancy(pose, project_perspective(translated(lifted, mean_offset), camera));
}

double orthographic_prior(const NormalizedPose2D& pose, const Pose3D& lifted, double lambda) {
    if (lambda == 0.0) return 0.0;
    return lambda * normalized_discrepancy(pose, project_orthographic(lifted));
}

PriorValue prior_perspective(const Pose2D& pose, const LifterModel& model, const CameraModel& camera, double lambda) {
    camera.validate();
    const NormalizedPose2D normalized = normalize_pose(pose);
    PriorValue out;
    out.lifted = lift_normalized(model, std::span(&normalized, 1)).front();
    out.value = perspective_prior(normalized, out.lifted, model.mean_offset, camera, lambda);
    return out;
}

PriorValue prior_orthographic(const Pose2D& pose, const LifterModel& model, double lambda) {
    const NormalizedPose2D normalized = normalize_pose(pose);
    PriorValue out;
    out.lifted = lift_normalized(model, std::span(&normalized, 1)).front();
    out.value = orthographic_prior(normalized, out.lifted, lambda);
    return out;
}

InferenceResult infer(const HeatMapVolume& volume, const LifterModel& model, const InferenceConfig& config,
                      const std::optional<CameraModel>& camera) {
    config.validate();
    volume.validate();
    if (volume.joint_count() != model.joint_count()) {
        throw DimensionMismatchError("infer: volume has " + std::to_string(volume.joint_count()) +
                                     " joints, model expects " + std::to_string(model.joint_count()));
    }
    if (config.prior == PriorMode::perspective) {
        if (!camera) throw DataError("infer: perspective prior requires a camera");
        camera->validate();
    }

    const JointCandidateSet modes =
        extract_candidates(volume, config.generator, config.mode_options(), config.nms_upscale);
    const std::vector<Assignment> ranked = n_best_poses(modes, config.candidates);
    const int grid = volume.grid_size();

    InferenceResult result;
    result.candidates.reserve(ranked.size());
    std::vector<NormalizedPose2D> normalized;
    std::vector<std::size_t> liftable;
    normalized.reserve(ranked.size());
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        PoseCandidate c;
        c.indices = ranked[k].indices;
        c.score = ranked[k].score;
        c.grid_pose.joints.reserve(c.indices.size());
        for (std::size_t i = 0; i < c.indices.size(); ++i) {
            c.grid_pose.joints.push_back(modes.joints[i][static_cast<std::size_t>(c.indices[i])].position);
        }
        c.pose = crop_to_image(c.grid_pose, volume.box, grid);
        try {
            normalized.push_back(normalize_pose(c.pose));
            liftable.push_back(k);
        } catch (const DegeneratePoseError& e) {
            c.prior_failed = true;
            c.diagnostic = e.what();
        }
        result.candidates.push_back(std::move(c));
    }

    std::vector<Pose3D> lifted = lift_normalized(model, normalized);
    for (std::size_t n = 0; n < liftable.size(); ++n) {
        PoseCandidate& c = result.candidates[liftable[n]];
        c.lifted = std::move(lifted[n]);
        try {
            c.prior = config.prior == PriorMode::perspective
                          ? perspective_prior(normalized[n], c.lifted, model.mean_offset, *camera, config.lambda)
                          : orthographic_prior(normalized[n], c.lifted, config.lambda);
        } catch (const Error& e) {
            c.prior_failed = true;
            c.diagnostic = e.what();
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    double best_energy = kInf;
    bool found = false;
    for (std::size_t k = 0; k < result.candidates.size(); ++k) {
        PoseCandidate& c = result.candidates[k];
        if (c.prior_failed) {
            c.prior = kInf;
            c.energy = kInf;
            continue;
        }
        c.energy = -c.score + c.prior;
        if (!found || c.energy < best_energy) {
            best_energy = c.energy;
            result.best = k;
            found = true;
        }
    }
    // Every candidate failed: fall back to the top-ranked one.
    if (!found) result.best = 0;

    const PoseCandidate& w = result.candidates[result.best];
    result.pose2d = w.pose;
    result.grid_pose2d = w.grid_pose;
    result.pose3d = w.lifted;
    result.pose3d_absolute = translated(w.lifted, model.mean_offset);
    return result;
}

Pose2D greedy_decode(const HeatMapVolume& volume, const InferenceConfig& config) {
    config.validate();
    volume.validate();
    MeanShiftOptions options = config.mode_options();
    options.max_candidates = 1;
    const JointCandidateSet modes = extract_candidates(volume, config.generator, options, config.nms_upscale);
    Pose2D grid_pose;
    for (const auto& joint : modes.joints) grid_pose.joints.push_back(joint.front().position);
    return crop_to_image(grid_pose, volume.box, volume.grid_size());
}

}  // namespace plcrf
