#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "plcrf/crf.hpp"
#include "plcrf/errors.hpp"
#include "test_support.hpp"

namespace plcrf {
namespace {

using testing::random_pose2d;
using testing::random_pose3d;

std::vector<Point2> reference_normalize(const std::vector<Point2>& pts) {
    Point2 m = Point2::Zero();
    for (const auto& p : pts) m += p;
    m /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (const auto& p : pts) ss += (p - m).squaredNorm();
    const double s = std::sqrt(ss / static_cast<double>(pts.size()));
    std::vector<Point2> out;
    for (const auto& p : pts) out.push_back((p - m) / s);
    return out;
}

double reference_discrepancy(const Pose2D& a, const std::vector<Point2>& b) {
    const auto na = reference_normalize(a.joints);
    const auto nb = reference_normalize(b);
    double total = 0.0;
    for (std::size_t i = 0; i < na.size(); ++i) total += (na[i] - nb[i]).squaredNorm();
    return total;
}

// Single affine layer with zero weights: every input lifts to `fixed`.
LifterModel constant_lifter(const Pose3D& fixed, const Point3& offset = Point3::Zero()) {
    LifterModel m(fixed.size(), {}, LifterInputMode::normalized_only);
    for (std::size_t j = 0; j < fixed.size(); ++j) m.bias(0).segment<3>(static_cast<Eigen::Index>(3 * j)) = fixed.joints[j];
    m.mean_offset = offset;
    return m;
}

LifterModel random_lifter(std::size_t joints, std::uint64_t seed) {
    LifterModel m(joints, {12, 12});
    m.initialize(seed);
    m.output_scale = 200.0;
    m.mean_offset = Point3(0.0, 0.0, 5000.0);
    m.input_shift.tail<3>() << 500.0, 500.0, 100.0;
    m.input_scale.tail<3>() << 100.0, 100.0, 30.0;
    return m;
}

HeatMapVolume bump_volume(const std::vector<std::vector<std::pair<Point2, float>>>& bumps, int grid = 32) {
    HeatMapVolume v;
    v.box.origin = Point2(300.0, 250.0);
    v.box.side = 256.0;
    for (const auto& joint : bumps) {
        HeatMap m(grid, grid);
        for (const auto& [c, h] : joint) {
            const HeatMap b = render_gaussian(c, grid, 1.0);
            for (std::size_t i = 0; i < m.values().size(); ++i) m.values()[i] += h * b.values()[i];
        }
        v.maps.push_back(std::move(m));
    }
    return v;
}

HeatMapVolume random_volume(std::mt19937_64& rng, std::size_t joints) {
    std::uniform_real_distribution<double> pos(3.0, 28.0), h(0.3, 1.0), u(0.0, 1.0);
    std::vector<std::vector<std::pair<Point2, float>>> bumps(joints);
    for (auto& j : bumps) {
        j.push_back({Point2(pos(rng), pos(rng)), static_cast<float>(h(rng))});
        if (u(rng) < 0.5) j.push_back({Point2(pos(rng), pos(rng)), static_cast<float>(h(rng))});
    }
    return bump_volume(bumps);
}

TEST(Priors, OrthographicMatchesReference) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        const Pose2D p = random_pose2d(rng, 6);
        const Pose3D lifted = random_pose3d(rng, 6);
        std::vector<Point2> xy;
        for (const auto& j : lifted.joints) xy.push_back(j.head<2>());
        const double lambda = 0.5 + t * 0.1;
        EXPECT_NEAR(orthographic_prior(normalize_pose(p), lifted, lambda), lambda * reference_discrepancy(p, xy), 1e-9);
    }
}

TEST(Priors, PerspectiveMatchesReference) {
    std::mt19937_64 rng(2);
    CameraModel cam{1000.0, 1100.0, 480.0, 520.0};
    const Point3 offset(100.0, -50.0, 6000.0);
    for (int t = 0; t < 50; ++t) {
        const Pose2D p = random_pose2d(rng, 6);
        const Pose3D lifted = random_pose3d(rng, 6);
        std::vector<Point2> uv;
        for (const auto& j : lifted.joints) {
            const Point3 q = j + offset;
            uv.emplace_back(cam.fx * q.x() / q.z() + cam.cx, cam.fy * q.y() / q.z() + cam.cy);
        }
        EXPECT_NEAR(perspective_prior(normalize_pose(p), lifted, offset, cam, 2.0), 2.0 * reference_discrepancy(p, uv),
                    1e-9);
    }
}

TEST(Priors, ZeroForConsistentPoses) {
    std::mt19937_64 rng(3);
    const Pose3D lifted = random_pose3d(rng, 8);
    const CameraModel cam;
    const Point3 offset(0.0, 0.0, 4000.0);
    EXPECT_NEAR(orthographic_prior(normalize_pose(project_orthographic(lifted)), lifted, 1.0), 0.0, 1e-20);
    const Pose2D image = project_perspective(translated(lifted, offset), cam);
    EXPECT_NEAR(perspective_prior(normalize_pose(image), lifted, offset, cam, 1.0), 0.0, 1e-20);
}

TEST(Priors, InvariantToImageSimilarityOfInput) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> s(0.2, 5.0), d(-300.0, 300.0);
    for (int t = 0; t < 30; ++t) {
        const Pose2D p = random_pose2d(rng, 7);
        const Pose3D lifted = random_pose3d(rng, 7);
        Pose2D q = p;
        const double k = s(rng);
        const Point2 shift(d(rng), d(rng));
        for (auto& j : q.joints) j = k * j + shift;
        EXPECT_NEAR(orthographic_prior(normalize_pose(p), lifted, 1.0), orthographic_prior(normalize_pose(q), lifted, 1.0),
                    1e-9);
    }
}

TEST(Priors, LambdaZeroIsExactlyZero) {
    std::mt19937_64 rng(5);
    const Pose2D p = random_pose2d(rng, 5);
    Pose3D behind = random_pose3d(rng, 5);
    EXPECT_EQ(orthographic_prior(normalize_pose(p), behind, 0.0), 0.0);
    // Lambda zero never projects, so joints behind the camera are harmless.
    EXPECT_EQ(perspective_prior(normalize_pose(p), behind, Point3(0, 0, -9000), CameraModel{}, 0.0), 0.0);
    EXPECT_THROW(perspective_prior(normalize_pose(p), behind, Point3(0, 0, -9000), CameraModel{}, 1.0),
                 BehindCameraError);
}

TEST(Infer, LambdaZeroEqualsGreedyDecode) {
    std::mt19937_64 rng(6);
    const LifterModel model = random_lifter(5, 7);
    InferenceConfig config;
    config.lambda = 0.0;
    config.candidates = 16;
    for (int t = 0; t < 30; ++t) {
        const HeatMapVolume v = random_volume(rng, 5);
        const InferenceResult r = infer(v, model, config, CameraModel{});
        EXPECT_EQ(r.best, 0u);
        const Pose2D greedy = greedy_decode(v, config);
        for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(r.pose2d.joints[j], greedy.joints[j]);
    }
}

TEST(Infer, EnergyIsNegativeScorePlusPrior) {
    std::mt19937_64 rng(8);
    const LifterModel model = random_lifter(5, 9);
    InferenceConfig config;
    config.candidates = 32;
    const CameraModel cam;
    for (int t = 0; t < 10; ++t) {
        const HeatMapVolume v = random_volume(rng, 5);
        const InferenceResult r = infer(v, model, config, cam);
        ASSERT_FALSE(r.candidates.empty());
        for (std::size_t k = 0; k < r.candidates.size(); ++k) {
            const PoseCandidate& c = r.candidates[k];
            const PriorValue pv = prior_perspective(c.pose, model, cam, config.lambda);
            EXPECT_NEAR(c.prior, pv.value, 1e-9);
            EXPECT_DOUBLE_EQ(c.energy, -c.score + c.prior);
            EXPECT_GE(c.energy, r.winner().energy);
            if (k < r.best) EXPECT_GT(c.energy, r.winner().energy);
        }
        for (std::size_t k = 1; k < r.candidates.size(); ++k) EXPECT_GE(r.candidates[k - 1].score, r.candidates[k].score);
        for (std::size_t j = 0; j < 5; ++j) {
            EXPECT_EQ(r.pose3d_absolute.joints[j], r.pose3d.joints[j] + model.mean_offset);
        }
    }
}

TEST(Infer, PriorOverridesStrongerDecoy) {
    // The lifter always predicts a square; joint 3 has a decoy slightly
    // stronger than the bump that completes the square.
    Pose3D square;
    square.joints = {Point3(-60, -60, 10), Point3(60, -60, -10), Point3(-60, 60, 5), Point3(60, 60, -5)};
    const LifterModel model = constant_lifter(square);
    const HeatMapVolume v = bump_volume({{{Point2(8, 8), 1.0f}},
                                         {{Point2(20, 8), 1.0f}},
                                         {{Point2(8, 20), 1.0f}},
                                         {{Point2(20, 20), 0.9f}, {Point2(27, 27), 1.0f}}});
    InferenceConfig config;
    config.prior = PriorMode::orthographic;
    config.candidates = 8;
    config.lambda = 0.0;
    const InferenceResult greedy = infer(v, model, config);
    EXPECT_LT((greedy.grid_pose2d.joints[3] - Point2(27, 27)).norm(), 0.5);
    config.lambda = 100.0;
    const InferenceResult prior = infer(v, model, config);
    EXPECT_LT((prior.grid_pose2d.joints[3] - Point2(20, 20)).norm(), 0.5);
    EXPECT_EQ(prior.best, 1u);
}

TEST(Infer, EqualEnergiesPickLowerRank) {
    // Two identical bumps give two candidates with the same score and, with
    // lambda zero, the same energy.
    const LifterModel model = random_lifter(2, 10);
    const HeatMapVolume v = bump_volume({{{Point2(8, 8), 1.0f}}, {{Point2(16, 24), 1.0f}, {Point2(24, 16), 1.0f}}});
    InferenceConfig config;
    config.lambda = 0.0;
    config.prior = PriorMode::orthographic;
    const InferenceResult r = infer(v, model, config);
    ASSERT_EQ(r.candidates.size(), 2u);
    EXPECT_EQ(r.candidates[0].energy, r.candidates[1].energy);
    EXPECT_EQ(r.best, 0u);
}

TEST(Infer, FailedPriorsGetInfiniteEnergy) {
    std::mt19937_64 rng(11);
    Pose3D fixed = random_pose3d(rng, 3);
    // Mean offset behind the camera: no candidate can be projected.
    const LifterModel model = constant_lifter(fixed, Point3(0, 0, -5000));
    const HeatMapVolume v = bump_volume({{{Point2(5, 5), 1.0f}, {Point2(25, 25), 0.8f}},
                                         {{Point2(10, 20), 1.0f}},
                                         {{Point2(20, 10), 1.0f}}});
    InferenceConfig config;
    const InferenceResult r = infer(v, model, config, CameraModel{});
    ASSERT_EQ(r.candidates.size(), 2u);
    for (const auto& c : r.candidates) {
        EXPECT_TRUE(c.prior_failed);
        EXPECT_EQ(c.energy, std::numeric_limits<double>::infinity());
        EXPECT_FALSE(c.diagnostic.empty());
    }
    EXPECT_EQ(r.best, 0u);
}

TEST(Infer, DegenerateCandidateIsSkipped) {
    // All joints share one bump except the second choice of joint 0.
    Pose3D fixed;
    fixed.joints = {Point3(0, 0, 0), Point3(10, 0, 0), Point3(0, 10, 0)};
    const LifterModel model = constant_lifter(fixed);
    const HeatMapVolume v = bump_volume({{{Point2(16, 16), 1.0f}, {Point2(4, 4), 0.5f}},
                                         {{Point2(16, 16), 1.0f}},
                                         {{Point2(16, 16), 1.0f}}});
    InferenceConfig config;
    config.prior = PriorMode::orthographic;
    const InferenceResult r = infer(v, model, config);
    ASSERT_EQ(r.candidates.size(), 2u);
    EXPECT_TRUE(r.candidates[0].prior_failed);
    EXPECT_EQ(r.candidates[0].energy, std::numeric_limits<double>::infinity());
    EXPECT_FALSE(r.candidates[1].prior_failed);
    EXPECT_EQ(r.best, 1u);
}

TEST(Infer, Errors) {
    std::mt19937_64 rng(12);
    const LifterModel model = random_lifter(4, 13);
    const HeatMapVolume v = random_volume(rng, 4);
    InferenceConfig config;
    EXPECT_THROW(infer(v, model, config), DataError);
    EXPECT_THROW(infer(random_volume(rng, 5), model, config, CameraModel{}), DimensionMismatchError);
    config.lambda = -1.0;
    EXPECT_THROW(infer(v, model, config, CameraModel{}), DataError);
    config = {};
    config.candidates = 0;
    EXPECT_THROW(infer(v, model, config, CameraModel{}), DataError);
    config = {};
    config.bandwidth = 0.0;
    EXPECT_THROW(infer(v, model, config, CameraModel{}), DataError);
    CameraModel bad;
    bad.fx = 0.0;
    EXPECT_THROW(infer(v, model, InferenceConfig{}, bad), DataError);
}

TEST(Infer, NmsGeneratorRuns) {
    std::mt19937_64 rng(14);
    const LifterModel model = random_lifter(4, 15);
    InferenceConfig config;
    config.generator = CandidateGenerator::nms;
    config.candidates = 8;
    const InferenceResult r = infer(random_volume(rng, 4), model, config, CameraModel{});
    EXPECT_EQ(r.candidates.size(), 8u);
    EXPECT_EQ(r.pose3d.size(), 4u);
}

}  // namespace
}  // namespace plcrf
