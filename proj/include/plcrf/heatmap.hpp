#pragma once

#include <cstddef>
#include <vector>

#include "plcrf/geometry.hpp"

namespace plcrf {

// Per-joint likelihood grid, row-major. Pixel (x, y) sits at grid coordinate
// (x, y); x indexes columns and y rows.
class HeatMap {
public:
    HeatMap() = default;
    HeatMap(int width, int height);
    HeatMap(int width, int height, std::vector<float> values);

    int width() const { return width_; }
    int height() const { return height_; }

    float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

    double sum() const;
    bool all_zero() const;

    // Replaces negative entries by zero. NaN and infinite values are left
    // for validate() to reject.
    void clamp_negative();
    void validate() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

struct HeatMapVolume {
    std::vector<HeatMap> maps;
    BoundingBox box;

    std::size_t joint_count() const { return maps.size(); }
    int grid_size() const { return maps.empty() ? 0 : maps.front().width(); }

    // Square grids of equal size, finite non-negative values, no all-zero
    // map, valid box.
    void validate() const;
};

// One smoothed-density mode: sub-pixel grid position and the flat-kernel
// density there.
struct Mode {
    Point2 position = Point2::Zero();
    double value = 0.0;
};

// Ranked modes per joint, best first.
struct JointCandidateSet {
    std::vector<std::vector<Mode>> joints;

    std::size_t joint_count() const { return joints.size(); }
};

struct MeanShiftOptions {
    double bandwidth = 3.0;
    std::size_t max_candidates = 128;
    double tolerance = 1e-4;
    int max_iterations = 100;
    // Converged points closer than this are merged; <= 0 means bandwidth / 2.
    double merge_radius = 0.0;

    double effective_merge_radius() const { return merge_radius > 0.0 ? merge_radius : 0.5 * bandwidth; }
    // Drop converged points from which a restart at distance saddle_probe
    // climbs to a different, denser point. saddle_probe <= 0 means
    // bandwidth / 6. The top mode is always kept.
    bool prune_saddles = true;
    double saddle_probe = 0.0;
    double effective_saddle_probe() const { return saddle_probe > 0.0 ? saddle_probe : bandwidth / 6.0; }
};

// Flat-kernel density: sum of h(p_j) over pixels with |p - p_j| < bandwidth.
double kde_value(const HeatMap& map, const Point2& p, double bandwidth);

// Weighted mean of the pixels inside the open disc of radius `bandwidth`.
// Throws EmptyWindowError when the window carries no weight.
Point2 mean_shift_step(const HeatMap& map, const Point2& p, double bandwidth);

// Iterates mean_shift_step from `start` until the step is shorter than the
// tolerance or the iteration cap is hit.
Point2 mean_shift(const HeatMap& map, const Point2& start, const MeanShiftOptions& options);

std::vector<Mode> find_modes(const HeatMap& map, const MeanShiftOptions& options);

inline std::vector<Mode> find_modes(const HeatMap& map, double bandwidth, std::size_t max_candidates) {
    MeanShiftOptions options;
    options.bandwidth = bandwidth;
    options.max_candidates = max_candidates;
    return find_modes(map, options);
}

// Baseline candidate generator: bilinear upsampling by `upscale`, local
// maxima over 8-neighborhoods, greedy non-maximum suppression with radius
// bandwidth * upscale. Positions are returned in grid coordinates; values are
// upsampled heat-map values.
std::vector<Mode> find_modes_nms(const HeatMap& map, std::size_t max_candidates, int upscale, double bandwidth = 3.0);

HeatMap upsample_bilinear(const HeatMap& map, int factor);

// exp(-|p - center|^2 / (2 sigma^2)) on a size x size grid; center in grid
// coordinates.
HeatMap render_gaussian(const Point2& center, int size, double sigma = 1.0);

enum class CandidateGenerator { mean_shift, nms };

JointCandidateSet extract_candidates(const HeatMapVolume& volume, CandidateGenerator generator,
                                     const MeanShiftOptions& options, int nms_upscale = 8);

}  // namespace plcrf
