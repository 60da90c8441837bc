#include "plcrf/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "plcrf/errors.hpp"

namespace plcrf {

namespace {

// Descending value; equal values ordered by (y, x) so results do not depend
// on seed order.
bool mode_before(const Mode& a, const Mode& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.position.y() != b.position.y()) return a.position.y() < b.position.y();
    return a.position.x() < b.position.x();
}

struct Window {
    int x0, x1, y0, y1;
};

Window window_bounds(const HeatMap& map, const Point2& p, double bandwidth) {
    Window w;
    w.x0 = std::max(0, static_cast<int>(std::ceil(p.x() - bandwidth)));
    w.x1 = std::min(map.width() - 1, static_cast<int>(std::floor(p.x() + bandwidth)));
    w.y0 = std::max(0, static_cast<int>(std::ceil(p.y() - bandwidth)));
    w.y1 = std::min(map.height() - 1, static_cast<int>(std::floor(p.y() + bandwidth)));
    return w;
}

}  // namespace

HeatMap::HeatMap(int width, int height)
    : width_(width), height_(height), values_(static_cast<std::size_t>(width) * height, 0.0f) {
    if (width <= 0 || height <= 0) throw DataError("heat map: dimensions must be positive");
}

HeatMap::HeatMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) throw DataError("heat map: dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(width) * height) {
        throw DimensionMismatchError("heat map: value count does not match dimensions");
    }
}

double HeatMap::sum() const {
    double s = 0.0;
    for (float v : values_) s += v;
    return s;
}

bool HeatMap::all_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](float v) { return v == 0.0f; });
}

void HeatMap::clamp_negative() {
    for (float& v : values_) {
        if (v < 0.0f) v = 0.0f;
    }
}

void HeatMap::validate() const {
    for (float v : values_) {
        if (!std::isfinite(v) || v < 0.0f) throw DataError("heat map: values must be finite and non-negative");
    }
    if (all_zero()) throw DataError("heat map: grid is all zero");
}

void HeatMapVolume::validate() const {
    if (maps.empty()) throw DataError("heat-map volume: no joints");
    const int size = maps.front().width();
    for (const auto& m : maps) {
        if (m.width() != size || m.height() != size) {
            throw DimensionMismatchError("heat-map volume: grids must be square and equally sized");
        }
        m.validate();
    }
    box.validate();
}

double kde_value(const HeatMap& map, const Point2& p, double bandwidth) {
    const Window w = window_bounds(map, p, bandwidth);
    const double b2 = bandwidth * bandwidth;
    double total = 0.0;
    for (int y = w.y0; y <= w.y1; ++y) {
        const double dy = y - p.y();
        for (int x = w.x0; x <= w.x1; ++x) {
            const double dx = x - p.x();
            if (dx * dx + dy * dy < b2) total += map.at(x, y);
        }
    }
    return total;
}

Point2 mean_shift_step(const HeatMap& map, const Point2& p, double bandwidth) {
    const Window w = window_bounds(map, p, bandwidth);
    const double b2 = bandwidth * bandwidth;
    double weight = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (int y = w.y0; y <= w.y1; ++y) {
        const double dy = y - p.y();
        for (int x = w.x0; x <= w.x1; ++x) {
            const double dx = x - p.x();
            if (dx * dx + dy * dy < b2) {
                const double h = map.at(x, y);
                weight += h;
                sx += h * x;
                sy += h * y;
            }
        }
    }
    if (!(weight > 0.0)) throw EmptyWindowError("mean_shift_step: window carries no weight");
    return {sx / weight, sy / weight};
}

Point2 mean_shift(const HeatMap& map, const Point2& start, const MeanShiftOptions& options) {
    Point2 q = start;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Point2 next = mean_shift_step(map, q, options.bandwidth);
        const double moved = (next - q).norm();
        q = next;
        if (moved < options.tolerance) break;
    }
    return q;
}

namespace {

// Flat-kernel mean shift also stalls where opposing tails balance. Restarting
// from small offsets escapes such points toward a denser mode.
bool is_saddle(const HeatMap& map, const Mode& mode, const MeanShiftOptions& options) {
    const double probe = options.effective_saddle_probe();
    const double merge2 = options.effective_merge_radius() * options.effective_merge_radius();
    for (int k = 0; k < 8; ++k) {
        const double angle = k * (std::numbers::pi / 4.0);
        const Point2 start = mode.position + probe * Point2(std::cos(angle), std::sin(angle));
        Point2 end;
        try {
            end = mean_shift(map, start, options);
        } catch (const EmptyWindowError&) {
            continue;
        }
        if ((end - mode.position).squaredNorm() >= merge2 &&
            kde_value(map, end, options.bandwidth) > mode.value) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<Mode> find_modes(const HeatMap& map, const MeanShiftOptions& options) {
    if (!(options.bandwidth > 0.0)) throw DataError("find_modes: bandwidth must be positive");
    if (options.max_candidates == 0) throw DataError("find_modes: need at least one candidate");
    if (map.all_zero()) throw DataError("find_modes: grid is all zero");

    std::vector<Point2> converged;
    converged.reserve(map.values().size());
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            if (map.at(x, y) > 0.0f) converged.push_back(mean_shift(map, Point2(x, y), options));
        }
    }

    // Bitwise duplicates are common (neighbouring seeds share a basin).
    std::sort(converged.begin(), converged.end(), [](const Point2& a, const Point2& b) {
        return a.y() != b.y() ? a.y() < b.y() : a.x() < b.x();
    });
    converged.erase(std::unique(converged.begin(), converged.end()), converged.end());

    std::vector<Mode> points;
    points.reserve(converged.size());
    for (const auto& q : converged) points.push_back({q, kde_value(map, q, options.bandwidth)});
    std::sort(points.begin(), points.end(), mode_before);

    const double merge2 = options.effective_merge_radius() * options.effective_merge_radius();
    std::vector<Mode> modes;
    for (const auto& candidate : points) {
        const bool merged = std::any_of(modes.begin(), modes.end(), [&](const Mode& m) {
            return (m.position - candidate.position).squaredNorm() < merge2;
        });
        if (merged) continue;
        if (options.prune_saddles && !modes.empty() && is_saddle(map, candidate, options)) continue;
        modes.push_back(candidate);
        if (modes.size() == options.max_candidates) break;
    }
    return modes;
}

HeatMap upsample_bilinear(const HeatMap& map, int factor) {
    if (factor < 1) throw DataError("upsample_bilinear: factor must be >= 1");
    HeatMap out(map.width() * factor, map.height() * factor);
    const double max_x = map.width() - 1;
    const double max_y = map.height() - 1;
    for (int v = 0; v < out.height(); ++v) {
        const double gy = std::clamp((v + 0.5) / factor - 0.5, 0.0, max_y);
        const int y0 = static_cast<int>(std::floor(gy));
        const int y1 = std::min(y0 + 1, map.height() - 1);
        const double ty = gy - y0;
        for (int u = 0; u < out.width(); ++u) {
            const double gx = std::clamp((u + 0.5) / factor - 0.5, 0.0, max_x);
            const int x0 = static_cast<int>(std::floor(gx));
            const int x1 = std::min(x0 + 1, map.width() - 1);
            const double tx = gx - x0;
            const double top = (1.0 - tx) * map.at(x0, y0) + tx * map.at(x1, y0);
            const double bottom = (1.0 - tx) * map.at(x0, y1) + tx * map.at(x1, y1);
            out.at(u, v) = static_cast<float>((1.0 - ty) * top + ty * bottom);
        }
    }
    return out;
}

std::vector<Mode> find_modes_nms(const HeatMap& map, std::size_t max_candidates, int upscale, double bandwidth) {
    if (upscale < 1) throw DataError("find_modes_nms: upscale must be >= 1");
    const HeatMap up = upsample_bilinear(map, upscale);

    // Non-strict maxima: bilinear upsampling and edge clamping produce flat
    // tops, and suppression below removes the duplicates.
    std::vector<Mode> peaks;
    for (int y = 0; y < up.height(); ++y) {
        for (int x = 0; x < up.width(); ++x) {
            const float v = up.at(x, y);
            if (!(v > 0.0f)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= up.width() || ny >= up.height()) continue;
                    if (up.at(nx, ny) > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) peaks.push_back({Point2(x, y), v});
        }
    }
    std::sort(peaks.begin(), peaks.end(), mode_before);

    const double radius = bandwidth * upscale;
    std::vector<Mode> kept;
    for (const auto& p : peaks) {
        if (kept.size() == max_candidates) break;
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Mode& k) {
            return (k.position - p.position).norm() < radius;
        });
        if (!suppressed) kept.push_back(p);
    }
    for (auto& k : kept) k.position = ((k.position.array() + 0.5) / upscale - 0.5).matrix();
    return kept;
}

HeatMap render_gaussian(const Point2& center, int size, double sigma) {
    if (!(sigma > 0.0)) throw DataError("render_gaussian: sigma must be positive");
    HeatMap map(size, size);
    const double denom = 2.0 * sigma * sigma;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double d2 = (Point2(x, y) - center).squaredNorm();
            map.at(x, y) = static_cast<float>(std::exp(-d2 / denom));
        }
    }
    return map;
}

JointCandidateSet extract_candidates(const HeatMapVolume& volume, CandidateGenerator generator,
                                     const MeanShiftOptions& options, int nms_upscale) {
    JointCandidateSet set;
    set.joints.reserve(volume.maps.size());
    for (const auto& map : volume.maps) {
        if (generator == CandidateGenerator::mean_shift) {
            set.joints.push_back(find_modes(map, options));
        } else {
            set.joints.push_back(find_modes_nms(map, options.max_candidates, nms_upscale, options.bandwidth));
        }
    }
    return set;
}

}  // namespace plcrf
