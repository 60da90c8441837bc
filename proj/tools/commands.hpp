#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "plcrf/benchmark.hpp"
#include "plcrf/crf.hpp"
#include "plcrf/lifter.hpp"
#include "plcrf/synth.hpp"

namespace plcrf::cli {

// Bad arguments, missing inputs or an output path that already exists.
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kSuccess = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct SynthOptions {
    std::filesystem::path out;
    bool overwrite = false;
    std::uint64_t seed = 0;
    std::size_t frames = 100;
    DatasetSpec data;
};

struct TrainOptions {
    std::filesystem::path poses2d;
    std::filesystem::path poses3d;
    std::filesystem::path out;
    bool overwrite = false;
    LifterTrainConfig train;
};

struct InferOptions {
    std::filesystem::path heatmaps;
    std::filesystem::path model;
    std::optional<std::filesystem::path> camera;
    std::filesystem::path out;
    bool overwrite = false;
    InferenceConfig config;
    std::size_t workers = 1;
};

struct EvalOptions {
    std::filesystem::path gt;
    std::filesystem::path pred;
    std::optional<std::filesystem::path> gt2d;
    std::optional<std::filesystem::path> pred2d;
    std::optional<std::filesystem::path> boxes;
    std::optional<std::filesystem::path> out;  // stdout when absent
    bool overwrite = false;
    std::size_t root = 0;
};

struct BenchOptions {
    std::filesystem::path out;
    bool overwrite = false;
    BenchmarkSpec spec;
    bool with_nms = false;
    std::optional<std::filesystem::path> model;
};

int run_synth(const SynthOptions& options);
int run_train(const TrainOptions& options);
int run_infer(const InferOptions& options);
int run_eval(const EvalOptions& options);
int run_bench(const BenchOptions& options);

}  // namespace plcrf::cli
