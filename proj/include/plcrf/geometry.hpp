#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace plcrf {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

// 2D joint positions. Depending on context these are pixels in the original
// image, pixels in the 256x256 crop, or heat-map grid coordinates; the
// function that produces a pose documents which.
struct Pose2D {
    std::vector<Point2> joints;

    std::size_t size() const { return joints.size(); }
};

// 3D joint positions in millimeters, camera coordinate system
// (X right, Y down, Z forward).
struct Pose3D {
    std::vector<Point3> joints;

    std::size_t size() const { return joints.size(); }
};

// Pose with its centroid removed and scaled to unit RMS joint norm.
// The input is recovered as scale * joints[i] + mean.
struct NormalizedPose2D {
    std::vector<Point2> joints;
    Point2 mean = Point2::Zero();
    double scale = 1.0;

    Pose2D denormalize() const;
};

struct CameraModel {
    double fx = 1150.0;
    double fy = 1150.0;
    double cx = 500.0;
    double cy = 500.0;

    void validate() const;
};

// Square box in the original image. The crop seen by the heat-map regressor
// covers [origin, origin + side) along both axes.
struct BoundingBox {
    Point2 origin = Point2::Zero();
    double side = 1.0;

    void validate() const;
};

NormalizedPose2D normalize_pose(const Pose2D& pose);

Pose2D project_perspective(const Pose3D& pose, const CameraModel& camera);
Pose2D project_orthographic(const Pose3D& pose);

// Root-relative mean per-joint position error (mm).
double mpjpe(const Pose3D& gt, const Pose3D& est, std::size_t root_index);

// Mean per-joint error after aligning est to gt with the best similarity
// transform (rotation without reflection, uniform scale, translation).
double procrustes_error(const Pose3D& gt, const Pose3D& est);

struct SimilarityTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double scale = 1.0;
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Point3 apply(const Point3& p) const { return scale * (rotation * p) + translation; }
};

// Least-squares similarity mapping `source` onto `target`.
SimilarityTransform align_similarity(const Pose3D& target, const Pose3D& source);

// Mean per-joint Euclidean distance between two 2D poses in the same frame.
double error_2d(const Pose2D& gt, const Pose2D& est);

// Heat-map grid coordinates (pixel centers at integers) to original-image
// pixels and back. `heatmap_size` is the grid side length.
Point2 crop_to_image(const Point2& grid_point, const BoundingBox& box, int heatmap_size);
Point2 image_to_crop(const Point2& image_point, const BoundingBox& box, int heatmap_size);

Pose2D crop_to_image(const Pose2D& grid_pose, const BoundingBox& box, int heatmap_size);
Pose2D image_to_crop(const Pose2D& image_pose, const BoundingBox& box, int heatmap_size);

// Side length of the normalized input image the heat maps are defined on.
inline constexpr int kCropImageSize = 256;

// Original-image pixels to the kCropImageSize crop used by the 2D metric.
Pose2D image_to_crop_image(const Pose2D& image_pose, const BoundingBox& box);

Point3 centroid(const Pose3D& pose);
Pose3D translated(const Pose3D& pose, const Point3& offset);

}  // namespace plcrf
