#include "plcrf/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "plcrf/errors.hpp"

namespace plcrf {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatchError(std::string(what) + ": joint counts differ (" + std::to_string(a) +
                                     " vs " + std::to_string(b) + ")");
    }
}

Eigen::Matrix3Xd to_matrix(const Pose3D& pose) {
    Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(pose.size()));
    for (std::size_t i = 0; i < pose.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pose.joints[i];
    return m;
}

}  // namespace

Pose2D NormalizedPose2D::denormalize() const {
    Pose2D out;
    out.joints.reserve(joints.size());
    for (const auto& p : joints) out.joints.push_back(scale * p + mean);
    return out;
}

void CameraModel::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
        !std::isfinite(cy)) {
        throw DataError("camera: focal lengths must be positive and all intrinsics finite");
    }
}

void BoundingBox::validate() const {
    if (!(side > 0.0) || !std::isfinite(side) || !origin.allFinite()) {
        throw DataError("bounding box: side must be positive and finite");
    }
}

NormalizedPose2D normalize_pose(const Pose2D& pose) {
    const std::size_t count = pose.size();
    if (count < 2) throw DegeneratePoseError("normalize_pose: need at least two joints");

    Point2 mean = Point2::Zero();
    for (const auto& p : pose.joints) mean += p;
    mean /= static_cast<double>(count);

    double sum_sq = 0.0;
    for (const auto& p : pose.joints) sum_sq += (p - mean).squaredNorm();
    const double scale = std::sqrt(sum_sq / static_cast<double>(count));

    // Relative threshold so that poses far from the origin are judged by
    // their spread, not by absolute magnitude.
    const double magnitude = std::max(1.0, mean.cwiseAbs().maxCoeff());
    if (!std::isfinite(scale) || scale <= 1e-12 * magnitude) {
        throw DegeneratePoseError("normalize_pose: all joints coincide");
    }

    NormalizedPose2D out;
    out.mean = mean;
    out.scale = scale;
    out.joints.reserve(count);
    for (const auto& p : pose.joints) out.joints.push_back((p - mean) / scale);
    return out;
}

Pose2D project_perspective(const Pose3D& pose, const CameraModel& camera) {
    Pose2D out;
    out.joints.reserve(pose.size());
    for (std::size_t i = 0; i < pose.size(); ++i) {
        const Point3& p = pose.joints[i];
        if (!(p.z() > 0.0)) {
            throw BehindCameraError("project_perspective: joint " + std::to_string(i) + " has Z <= 0");
        }
        out.joints.emplace_back(camera.fx * p.x() / p.z() + camera.cx, camera.fy * p.y() / p.z() + camera.cy);
    }
    return out;
}

Pose2D project_orthographic(const Pose3D& pose) {
    Pose2D out;
    out.joints.reserve(pose.size());
    for (const auto& p : pose.joints) out.joints.emplace_back(p.x(), p.y());
    return out;
}

double mpjpe(const Pose3D& gt, const Pose3D& est, std::size_t root_index) {
    require_same_size(gt.size(), est.size(), "mpjpe");
    if (root_index >= gt.size()) throw DataError("mpjpe: root index out of range");
    const Point3& gt_root = gt.joints[root_index];
    const Point3& est_root = est.joints[root_index];
    double total = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        total += ((gt.joints[i] - gt_root) - (est.joints[i] - est_root)).norm();
    }
    return total / static_cast<double>(gt.size());
}

SimilarityTransform align_similarity(const Pose3D& target, const Pose3D& source) {
    require_same_size(target.size(), source.size(), "align_similarity");
    if (target.size() < 3) throw DataError("align_similarity: need at least three joints");

    const Eigen::Matrix3Xd dst = to_matrix(target);
    const Eigen::Matrix3Xd src = to_matrix(source);
    const double n = static_cast<double>(target.size());

    const Eigen::Vector3d dst_mean = dst.rowwise().mean();
    const Eigen::Vector3d src_mean = src.rowwise().mean();
    const Eigen::Matrix3Xd dst_c = dst.colwise() - dst_mean;
    const Eigen::Matrix3Xd src_c = src.colwise() - src_mean;

    const double src_var = src_c.squaredNorm() / n;
    const double dst_var = dst_c.squaredNorm() / n;
    if (src_var <= std::numeric_limits<double>::min() || dst_var <= std::numeric_limits<double>::min()) {
        throw DegeneratePoseError("align_similarity: point set has zero variance");
    }

    const Eigen::Matrix3d cov = dst_c * src_c.transpose() / n;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);

    Eigen::Vector3d signs = Eigen::Vector3d::Ones();
    if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) signs(2) = -1.0;

    SimilarityTransform t;
    t.rotation = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
    t.scale = svd.singularValues().dot(signs) / src_var;
    t.translation = dst_mean - t.scale * t.rotation * src_mean;
    return t;
}

double procrustes_error(const Pose3D& gt, const Pose3D& est) {
    const SimilarityTransform t = align_similarity(gt, est);
    double total = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) total += (gt.joints[i] - t.apply(est.joints[i])).norm();
    return total / static_cast<double>(gt.size());
}

double error_2d(const Pose2D& gt, const Pose2D& est) {
    require_same_size(gt.size(), est.size(), "error_2d");
    if (gt.size() == 0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) total += (gt.joints[i] - est.joints[i]).norm();
    return total / static_cast<double>(gt.size());
}

Point2 crop_to_image(const Point2& grid_point, const BoundingBox& box, int heatmap_size) {
    if (heatmap_size <= 0) throw DataError("crop_to_image: heat-map size must be positive");
    const double cell = box.side / heatmap_size;
    return box.origin + (grid_point.array() + 0.5).matrix() * cell;
}

Point2 image_to_crop(const Point2& image_point, const BoundingBox& box, int heatmap_size) {
    if (heatmap_size <= 0) throw DataError("image_to_crop: heat-map size must be positive");
    const double cell = box.side / heatmap_size;
    return ((image_point - box.origin) / cell).array() - 0.5;
}

Pose2D crop_to_image(const Pose2D& grid_pose, const BoundingBox& box, int heatmap_size) {
    Pose2D out;
    out.joints.reserve(grid_pose.size());
    for (const auto& p : grid_pose.joints) out.joints.push_back(crop_to_image(p, box, heatmap_size));
    return out;
}

Pose2D image_to_crop(const Pose2D& image_pose, const BoundingBox& box, int heatmap_size) {
    Pose2D out;
    out.joints.reserve(image_pose.size());
    for (const auto& p : image_pose.joints) out.joints.push_back(image_to_crop(p, box, heatmap_size));
    return out;
}

Pose2D image_to_crop_image(const Pose2D& image_pose, const BoundingBox& box) {
    return image_to_crop(image_pose, box, kCropImageSize);
}

Point3 centroid(const Pose3D& pose) {
    Point3 c = Point3::Zero();
    if (pose.size() == 0) return c;
    for (const auto& p : pose.joints) c += p;
    return c / static_cast<double>(pose.size());
}

Pose3D translated(const Pose3D& pose, const Point3& offset) {
    Pose3D out;
    out.joints.reserve(pose.size());
    for (const auto& p : pose.joints) out.joints.push_back(p + offset);
    return out;
}

}  // namespace plcrf
