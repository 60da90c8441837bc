#include "plcrf/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "plcrf/errors.hpp"
#include "plcrf/parallel.hpp"

namespace plcrf {

namespace {

constexpr std::uint64_t kTrainStream = 100;
constexpr std::uint64_t kTestStream = 200;
constexpr std::uint64_t kLifterStream = 300;
constexpr std::uint64_t kBootstrapStream = 400;

double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

const char* prior_name(PriorMode m) { return m == PriorMode::perspective ? "perspective" : "orthographic"; }
const char* generator_name(CandidateGenerator g) { return g == CandidateGenerator::mean_shift ? "mean-shift" : "nms"; }

}  // namespace

ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, std::uint64_t seed,
                                     double level) {
    if (values.empty()) throw DataError("bootstrap: no values");
    if (resamples == 0) throw DataError("bootstrap: need at least one resample");
    if (!(level > 0.0 && level < 1.0)) throw DataError("bootstrap: level must lie in (0, 1)");
    ConfidenceInterval ci;
    ci.mean = mean_of(values);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) s += values[pick(rng)];
        m = s / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const double tail = 0.5 * (1.0 - level);
    const auto at = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, resamples - 1);
        return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
    };
    ci.low = at(tail);
    ci.high = at(1.0 - tail);
    return ci;
}

void BenchmarkSpec::validate() const {
    if (configs.empty()) throw DataError("benchmark: no inference configs");
    if (baseline >= configs.size()) throw DataError("benchmark: baseline index out of range");
    if (test_frames == 0) throw DataError("benchmark: need test frames");
    for (const auto& c : configs) c.config.validate();
    data.skeleton.validate();
    data.corruption.validate();
    data.scene.camera.validate();
}

std::vector<TrainingPair> make_training_pairs(const DatasetSpec& data, std::uint64_t seed, std::size_t count) {
    std::vector<TrainingPair> pairs(count);
    for (std::size_t k = 0; k < count; ++k) {
        pairs[k].pose3d = sample_scene_pose(data, seed, k);
        pairs[k].pose2d = project_perspective(pairs[k].pose3d, data.scene.camera);
    }
    return pairs;
}

std::vector<SyntheticFrame> make_test_frames(const DatasetSpec& data, std::uint64_t seed, std::size_t count) {
    std::vector<SyntheticFrame> frames(count);
    for (std::size_t k = 0; k < count; ++k) frames[k] = generate_frame(data, seed, k);
    return frames;
}

BenchmarkReport evaluate_frames(const BenchmarkSpec& spec, const LifterModel& model,
                                std::span<const SyntheticFrame> frames) {
    spec.validate();
    const std::size_t root = spec.data.skeleton.root();
    const std::size_t n = frames.size();

    BenchmarkReport report;
    report.seed = spec.seed;
    report.train_frames = spec.train_frames;
    report.test_frames = n;

    std::vector<double> lifter_mpjpe(n), lifter_sim(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Pose3D est = lift(model, frames[k].pose2d);
        lifter_mpjpe[k] = mpjpe(frames[k].pose3d, est, root);
        lifter_sim[k] = procrustes_error(frames[k].pose3d, est);
        report.corrupted_joints += static_cast<std::size_t>(
            std::count(frames[k].corrupted.begin(), frames[k].corrupted.end(), true));
    }
    report.lifter_mpjpe = mean_of(lifter_mpjpe);
    report.lifter_similarity = mean_of(lifter_sim);

    for (const auto& named : spec.configs) {
        ConfigMetrics m;
        m.name = named.name;
        m.config = named.config;
        m.frame_mpjpe.resize(n);
        m.frame_similarity.resize(n);
        m.frame_error2d.resize(n);
        m.chosen.resize(n);
        std::vector<std::size_t> failures(n, 0);
        const std::optional<CameraModel> camera = spec.data.scene.camera;
        parallel_for(n, spec.workers, [&](std::size_t k) {
            const SyntheticFrame& f = frames[k];
            const InferenceResult r = infer(f.volume, model, named.config, camera);
            m.frame_mpjpe[k] = mpjpe(f.pose3d, r.pose3d, root);
            m.frame_similarity[k] = procrustes_error(f.pose3d, r.pose3d);
            m.frame_error2d[k] =
                error_2d(image_to_crop_image(f.pose2d, f.volume.box), image_to_crop_image(r.pose2d, f.volume.box));
            m.chosen[k] = r.best;
            failures[k] = static_cast<std::size_t>(std::count_if(
                r.candidates.begin(), r.candidates.end(), [](const PoseCandidate& c) { return c.prior_failed; }));
        });
        m.mpjpe = mean_of(m.frame_mpjpe);
        m.similarity = mean_of(m.frame_similarity);
        m.error2d = mean_of(m.frame_error2d);
        for (std::size_t f : failures) m.failed_candidates += f;
        report.configs.push_back(std::move(m));
    }

    const ConfigMetrics& base = report.configs[spec.baseline];
    for (std::size_t c = 0; c < report.configs.size(); ++c) {
        if (c == spec.baseline) continue;
        const ConfigMetrics& other = report.configs[c];
        std::vector<double> gain(n);
        std::size_t same = 0;
        for (std::size_t k = 0; k < n; ++k) {
            gain[k] = base.frame_mpjpe[k] - other.frame_mpjpe[k];
            if (base.chosen[k] == other.chosen[k]) ++same;
        }
        Comparison cmp;
        cmp.baseline = base.name;
        cmp.name = other.name;
        cmp.mpjpe_gain = bootstrap_mean_ci(gain, spec.bootstrap_resamples, derive_seed(spec.seed, kBootstrapStream, c));
        cmp.relative_gain = base.mpjpe > 0.0 ? cmp.mpjpe_gain.mean / base.mpjpe : 0.0;
        cmp.same_choice_rate = static_cast<double>(same) / static_cast<double>(n);
        report.comparisons.push_back(cmp);
    }
    return report;
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec, const std::optional<LifterModel>& model) {
    spec.validate();
    double train_loss = 0.0;
    double train_mse = 0.0;
    LifterModel lifter;
    if (model) {
        lifter = *model;
    } else {
        const auto pairs = make_training_pairs(spec.data, derive_seed(spec.seed, kTrainStream, 0), spec.train_frames);
        LifterTrainConfig train = spec.train;
        train.seed = derive_seed(spec.seed, kLifterStream, 0);
        LifterTraining t = train_lifter(pairs, train);
        train_loss = t.final_loss;
        train_mse = t.final_mse_mm2;
        lifter = std::move(t.model);
    }
    const auto frames = make_test_frames(spec.data, derive_seed(spec.seed, kTestStream, 0), spec.test_frames);
    BenchmarkReport report = evaluate_frames(spec, lifter, frames);
    report.train_loss = train_loss;
    report.train_mse_mm2 = train_mse;
    return report;
}

std::string BenchmarkReport::to_json() const {
    using nlohmann::json;
    json j;
    j["seed"] = seed;
    j["train_frames"] = train_frames;
    j["test_frames"] = test_frames;
    j["train_loss"] = train_loss;
    j["train_mse_mm2"] = train_mse_mm2;
    j["lifter_only"] = {{"mpjpe_mm", lifter_mpjpe}, {"similarity_mm", lifter_similarity}};
    j["corrupted_joints"] = corrupted_joints;
    json cs = json::array();
    for (const auto& c : configs) {
        cs.push_back({{"name", c.name},
                      {"lambda", c.config.lambda},
                      {"bandwidth", c.config.bandwidth},
                      {"candidates", c.config.candidates},
                      {"prior", prior_name(c.config.prior)},
                      {"generator", generator_name(c.config.generator)},
                      {"mpjpe_mm", c.mpjpe},
                      {"similarity_mm", c.similarity},
                      {"error_2d_px", c.error2d},
                      {"failed_candidates", c.failed_candidates},
                      {"frame_mpjpe_mm", c.frame_mpjpe},
                      {"chosen", c.chosen}});
    }
    j["configs"] = std::move(cs);
    json cmp = json::array();
    for (const auto& c : comparisons) {
        cmp.push_back({{"baseline", c.baseline},
                       {"name", c.name},
                       {"mpjpe_gain_mm", c.mpjpe_gain.mean},
                       {"mpjpe_gain_ci95", {c.mpjpe_gain.low, c.mpjpe_gain.high}},
                       {"relative_gain", c.relative_gain},
                       {"same_choice_rate", c.same_choice_rate}});
    }
    j["comparisons"] = std::move(cmp);
    return j.dump(2) + "\n";
}

std::string BenchmarkReport::to_table() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "frames: %zu test, %zu train; lifter alone: MPJPE %.2f mm, similarity %.2f mm\n",
                  test_frames, train_frames, lifter_mpjpe, lifter_similarity);
    out += line;
    std::snprintf(line, sizeof line, "%-28s %12s %14s %10s\n", "method", "MPJPE (mm)", "Similarity (mm)", "2D (px)");
    out += line;
    for (const auto& c : configs) {
        std::snprintf(line, sizeof line, "%-28s %12.2f %14.2f %10.3f\n", c.name.c_str(), c.mpjpe, c.similarity,
                      c.error2d);
        out += line;
    }
    for (const auto& c : comparisons) {
        std::snprintf(line, sizeof line, "%s vs %s: gain %.2f mm [%.2f, %.2f] (%.1f%%), same choice %.1f%%\n",
                      c.name.c_str(), c.baseline.c_str(), c.mpjpe_gain.mean, c.mpjpe_gain.low, c.mpjpe_gain.high,
                      100.0 * c.relative_gain, 100.0 * c.same_choice_rate);
        out += line;
    }
    return out;
}

}  // namespace plcrf
