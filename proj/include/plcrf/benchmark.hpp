#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plcrf/crf.hpp"
#include "plcrf/lifter.hpp"
#include "plcrf/synth.hpp"

namespace plcrf {

struct ConfidenceInterval {
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;
};

// Percentile bootstrap interval for the mean of `values`.
ConfidenceInterval bootstrap_mean_ci(std::span<const double> values, std::size_t resamples, std::uint64_t seed,
                                     double level = 0.95);

struct NamedConfig {
    std::string name;
    InferenceConfig config;
};

struct BenchmarkSpec {
    DatasetSpec data;
    std::size_t train_frames = 5000;
    std::size_t test_frames = 1000;
    std::uint64_t seed = 0;
    LifterTrainConfig train;
    std::vector<NamedConfig> configs;
    // Index into configs; every other config is compared against it.
    std::size_t baseline = 0;
    std::size_t bootstrap_resamples = 2000;
    std::size_t workers = 1;

    void validate() const;
};

struct ConfigMetrics {
    std::string name;
    InferenceConfig config;
    double mpjpe = 0.0;
    double similarity = 0.0;
    double error2d = 0.0;
    std::vector<double> frame_mpjpe;
    std::vector<double> frame_similarity;
    std::vector<double> frame_error2d;
    std::vector<std::size_t> chosen;
    std::size_t failed_candidates = 0;
};

struct Comparison {
    std::string baseline;
    std::string name;
    // Baseline MPJPE minus this config's MPJPE; positive means improvement.
    ConfidenceInterval mpjpe_gain;
    double relative_gain = 0.0;
    double same_choice_rate = 0.0;
};

struct BenchmarkReport {
    std::uint64_t seed = 0;
    std::size_t train_frames = 0;
    std::size_t test_frames = 0;
    double train_loss = 0.0;
    double train_mse_mm2 = 0.0;
    double lifter_mpjpe = 0.0;  // lifter alone on exact 2D test poses
    double lifter_similarity = 0.0;
    std::size_t corrupted_joints = 0;
    std::vector<ConfigMetrics> configs;
    std::vector<Comparison> comparisons;

    std::string to_json() const;
    std::string to_table() const;
};

// Training pairs from the exact projections of a seeded pose stream.
std::vector<TrainingPair> make_training_pairs(const DatasetSpec& data, std::uint64_t seed, std::size_t count);

std::vector<SyntheticFrame> make_test_frames(const DatasetSpec& data, std::uint64_t seed, std::size_t count);

// Trains a lifter on the train split unless `model` is given, then evaluates
// every config on the same test frames.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec, const std::optional<LifterModel>& model = std::nullopt);

BenchmarkReport evaluate_frames(const BenchmarkSpec& spec, const LifterModel& model,
                                std::span<const SyntheticFrame> frames);

}  // namespace plcrf
