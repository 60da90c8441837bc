// Acceptance gate. Prints one PASS/FAIL line per criterion and exits with a
// non-zero status if any criterion fails.
//
// usage: plcrf_acceptance [--cli PATH] [--work DIR] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "plcrf/benchmark.hpp"
#include "plcrf/crf.hpp"
#include "plcrf/geometry.hpp"
#include "plcrf/heatmap.hpp"
#include "plcrf/lifter.hpp"
#include "plcrf/nbest.hpp"
#include "plcrf/synth.hpp"

namespace fs = std::filesystem;
using namespace plcrf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Options {
    fs::path cli;
    fs::path work = fs::temp_directory_path() / "plcrf_acceptance";
    std::set<int> only;
};

// ---------------------------------------------------------------------------
// 1. N-best exactness against brute force.

struct Tuple {
    std::vector<int> indices;
    double score;
};

// Colexicographic comparison: the last joint is most significant.
bool colex_less(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

std::vector<Tuple> brute_force_nbest(const ScoreTable& scores, std::size_t n) {
    std::vector<Tuple> all;
    std::vector<int> idx(scores.size(), 0);
    while (true) {
        double s = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) s += scores[i][static_cast<std::size_t>(idx[i])];
        all.push_back({idx, s});
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == static_cast<int>(scores[j].size())) idx[j++] = 0;
        if (j == idx.size()) break;
    }
    std::sort(all.begin(), all.end(), [](const Tuple& a, const Tuple& b) {
        if (a.score != b.score) return a.score > b.score;
        return colex_less(a.indices, b.indices);
    });
    if (all.size() > n) all.resize(n);
    return all;
}

Outcome criterion_nbest() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> joints(1, 4), cands(1, 5), count(1, 10), small(0, 3);
    std::uniform_real_distribution<double> real(0.0, 10.0);
    constexpr int kInstances = 10000;
    int mismatches = 0;
    int tie_instances = 0;
    for (int t = 0; t < kInstances; ++t) {
        const int m = joints(rng);
        const bool ties = t % 2 == 1;  // half the instances draw from a tiny integer range
        ScoreTable scores(static_cast<std::size_t>(m));
        for (auto& row : scores) {
            row.resize(static_cast<std::size_t>(cands(rng)));
            for (auto& v : row) v = ties ? static_cast<double>(small(rng)) : real(rng);
            std::sort(row.begin(), row.end(), std::greater<>());
        }
        tie_instances += ties;
        const auto n = static_cast<std::size_t>(count(rng));
        const auto got = n_best_poses(scores, n);
        const auto want = brute_force_nbest(scores, n);
        bool ok = got.size() == want.size();
        for (std::size_t k = 0; ok && k < got.size(); ++k) {
            ok = got[k].indices == want[k].indices && std::abs(got[k].score - want[k].score) <= 1e-12;
        }
        mismatches += !ok;
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 10.0,
            format("%d instances (%d tie-heavy), %d mismatches, %.2f s (limit 10 s)", kInstances, tie_instances,
                   mismatches, elapsed)};
}

// ---------------------------------------------------------------------------
// 2. Mean-shift fidelity on synthetic grids.

Outcome criterion_mean_shift() {
    std::mt19937_64 rng(777);
    constexpr int kGrid = 32;
    constexpr int kTrials = 1000;
    std::uniform_real_distribution<double> pos(4.0, kGrid - 5.0), amp(0.5, 1.0);

    int single_ok = 0;
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
        const Point2 c(pos(rng), pos(rng));
        const auto modes = find_modes(render_gaussian(c, kGrid, 1.0), 3.0, 128);
        const double err = modes.empty() ? 1e9 : (modes.front().position - c).norm();
        worst = std::max(worst, err);
        single_ok += err <= 0.5;
    }

    int double_ok = 0;
    for (int t = 0; t < kTrials; ++t) {
        Point2 a, b;
        do {
            a = Point2(pos(rng), pos(rng));
            b = Point2(pos(rng), pos(rng));
        } while ((a - b).norm() < 10.0);
        HeatMap map = render_gaussian(a, kGrid, 1.0);
        const HeatMap other = render_gaussian(b, kGrid, 1.0);
        const double scale = amp(rng);
        for (std::size_t i = 0; i < map.values().size(); ++i) {
            map.values()[i] += static_cast<float>(scale * other.values()[i]);
        }
        double_ok += find_modes(map, 3.0, 128).size() == 2;
    }
    const double single_rate = static_cast<double>(single_ok) / kTrials;
    const double double_rate = static_cast<double>(double_ok) / kTrials;
    return {single_rate >= 0.99 && double_rate >= 0.99,
            format("single bump within 0.5 px: %.1f%% (worst %.3f px); two bumps give 2 modes: %.1f%% (need 99%%)",
                   100.0 * single_rate, worst, 100.0 * double_rate)};
}

// ---------------------------------------------------------------------------
// 3. Analytic gradients against central differences.

Outcome criterion_gradients() {
    const auto start = Clock::now();
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> joints(2, 4), depth(0, 2), width(2, 8), batch(1, 6);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto m = static_cast<std::size_t>(joints(rng));
        std::vector<int> hidden(static_cast<std::size_t>(depth(rng)));
        for (auto& h : hidden) h = width(rng);
        const auto mode = t % 2 ? LifterInputMode::full : LifterInputMode::normalized_only;
        LifterModel model(m, hidden, mode);
        model.initialize(rng());
        std::vector<double> params = model.parameters();
        for (auto& p : params) p += 0.1 * normal(rng);  // nonzero biases too
        model.set_parameters(params);

        const int b = batch(rng);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(model.input_dimension()), b);
        Eigen::MatrixXd y(static_cast<Eigen::Index>(3 * m), b);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng);

        const LossGradient analytic = loss_and_gradient(model, x, y);
        constexpr double h = 1e-6;
        for (std::size_t p = 0; p < params.size(); ++p) {
            std::vector<double> plus = params, minus = params;
            plus[p] += h;
            minus[p] -= h;
            model.set_parameters(plus);
            const double lp = network_loss(model, x, y);
            model.set_parameters(minus);
            const double lm = network_loss(model, x, y);
            const double numeric = (lp - lm) / (2.0 * h);
            const double a = analytic.gradient[p];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
        model.set_parameters(params);
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-4 && elapsed < 30.0,
            format("100 configurations, worst relative error %.2e (limit 1e-4), %.2f s (limit 30 s)", worst, elapsed)};
}

// ---------------------------------------------------------------------------
// Shared benchmark fixtures.

constexpr std::uint64_t kBenchSeed = 2024;

BenchmarkSpec corruption_benchmark() {
    BenchmarkSpec spec;
    spec.seed = kBenchSeed;
    spec.train_frames = 5000;
    spec.test_frames = 1000;
    spec.data.corruption.distractor_probability = 0.15;
    spec.data.corruption.strength = 1.1;
    return spec;
}

struct TrainedLifter {
    LifterModel model;
    double seconds = 0.0;
};

TrainedLifter train_for(const BenchmarkSpec& spec, LifterInputMode mode) {
    const auto start = Clock::now();
    const auto pairs =
        make_training_pairs(spec.data, derive_seed(spec.seed, 100, 0), spec.train_frames);
    LifterTrainConfig train = spec.train;
    train.input_mode = mode;
    train.seed = derive_seed(spec.seed, 300, 0);
    TrainedLifter out{train_lifter(pairs, train).model, 0.0};
    out.seconds = seconds_since(start);
    return out;
}

double exact_input_mpjpe(const BenchmarkSpec& spec, const LifterModel& model) {
    const auto pairs = make_training_pairs(spec.data, derive_seed(spec.seed, 200, 0), spec.test_frames);
    const std::size_t root = spec.data.skeleton.root();
    double total = 0.0;
    for (const auto& p : pairs) total += mpjpe(p.pose3d, lift(model, p.pose2d), root);
    return total / static_cast<double>(pairs.size());
}

struct Fixtures {
    BenchmarkSpec spec = corruption_benchmark();
    std::unique_ptr<TrainedLifter> full;
    std::vector<SyntheticFrame> frames;

    const LifterModel& lifter() {
        if (!full) full = std::make_unique<TrainedLifter>(train_for(spec, LifterInputMode::full));
        return full->model;
    }
    const std::vector<SyntheticFrame>& test_frames() {
        if (frames.empty()) frames = make_test_frames(spec.data, derive_seed(spec.seed, 200, 0), spec.test_frames);
        return frames;
    }
};

// ---------------------------------------------------------------------------
// 4. Lifter learnability.

Outcome criterion_lifter(Fixtures& fx) {
    const auto start = Clock::now();
    const LifterModel& full = fx.lifter();
    const TrainedLifter reduced = train_for(fx.spec, LifterInputMode::normalized_only);
    const double e_full = exact_input_mpjpe(fx.spec, full);
    const double e_reduced = exact_input_mpjpe(fx.spec, reduced.model);
    const double limit = 0.2 * fx.spec.data.skeleton.mean_bone_length();
    const double elapsed = seconds_since(start) + fx.full->seconds;
    return {e_full < limit && e_full < e_reduced && elapsed < 600.0,
            format("MPJPE full input %.2f mm, x~ only %.2f mm, limit %.2f mm; training %.1f s + %.1f s (limit 600 s)",
                   e_full, e_reduced, limit, fx.full->seconds, reduced.seconds)};
}

// ---------------------------------------------------------------------------
// 5. Prior effectiveness on the corruption benchmark.

Outcome criterion_prior(Fixtures& fx) {
    const auto start = Clock::now();
    BenchmarkSpec spec = fx.spec;
    InferenceConfig unary;
    unary.lambda = 0.0;
    InferenceConfig prior;
    prior.lambda = 1.0;
    spec.configs = {{"lambda=0", unary}, {"lambda=1", prior}};
    spec.baseline = 0;
    const BenchmarkReport report = evaluate_frames(spec, fx.lifter(), fx.test_frames());
    const Comparison& c = report.comparisons.front();
    const double elapsed = seconds_since(start) + (fx.full ? fx.full->seconds : 0.0);
    return {c.relative_gain >= 0.05 && c.mpjpe_gain.low > 0.0 && elapsed < 600.0,
            format("MPJPE %.2f -> %.2f mm (%.1f%% reduction, need 5%%), gain 95%% CI [%.2f, %.2f] mm, "
                   "%zu corrupted joints, %.1f s (limit 600 s)",
                   report.configs[0].mpjpe, report.configs[1].mpjpe, 100.0 * c.relative_gain, c.mpjpe_gain.low,
                   c.mpjpe_gain.high, report.corrupted_joints, elapsed)};
}

// ---------------------------------------------------------------------------
// 6. Perspective and orthographic priors agree for distant subjects.

Outcome criterion_far_field() {
    BenchmarkSpec spec = corruption_benchmark();
    spec.seed = kBenchSeed + 1;
    spec.data.scene.min_depth = 40000.0;
    spec.data.scene.max_depth = 60000.0;
    const TrainedLifter lifter = train_for(spec, LifterInputMode::full);

    const auto frames = make_test_frames(spec.data, derive_seed(spec.seed, 200, 0), spec.test_frames);
    double extent = 0.0;
    double min_depth = 1e300;
    for (const auto& f : frames) {
        Eigen::Vector3d lo = f.pose3d.joints.front(), hi = lo;
        for (const auto& p : f.pose3d.joints) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
            min_depth = std::min(min_depth, p.z());
        }
        extent = std::max(extent, (hi - lo).maxCoeff());
    }

    InferenceConfig vp;
    InferenceConfig vo;
    vo.prior = PriorMode::orthographic;
    spec.configs = {{"V_p", vp}, {"V_o", vo}};
    const BenchmarkReport report = evaluate_frames(spec, lifter.model, frames);
    const double rate = report.comparisons.front().same_choice_rate;
    return {rate >= 0.95 && min_depth >= 20.0 * extent,
            format("same k* on %.1f%% of %zu frames (need 95%%); nearest joint depth %.0f mm = %.1fx largest extent "
                   "%.0f mm; MPJPE V_p %.2f, V_o %.2f mm",
                   100.0 * rate, frames.size(), min_depth, min_depth / extent, extent, report.configs[0].mpjpe,
                   report.configs[1].mpjpe)};
}

// ---------------------------------------------------------------------------
// 7. lambda = 0 reduces to greedy decoding.

Outcome criterion_greedy(Fixtures& fx) {
    InferenceConfig config;
    config.lambda = 0.0;
    const auto& frames = fx.test_frames();
    const CameraModel camera = fx.spec.data.scene.camera;
    std::size_t differ = 0;
    for (const auto& f : frames) {
        const InferenceResult r = infer(f.volume, fx.lifter(), config, camera);
        const Pose2D greedy = greedy_decode(f.volume, config);
        bool same = r.pose2d.size() == greedy.size();
        for (std::size_t i = 0; same && i < greedy.size(); ++i) same = r.pose2d.joints[i] == greedy.joints[i];
        differ += !same;
    }
    return {differ == 0, format("%zu of %zu frames differ from greedy top-1 decode", differ, frames.size())};
}

// ---------------------------------------------------------------------------
// 8. Metric invariances.

Outcome criterion_metrics() {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Pose3D gt;
        for (int i = 0; i < 17; ++i) gt.joints.emplace_back(300.0 * normal(rng), 300.0 * normal(rng), 300.0 * normal(rng));
        const Eigen::Matrix3d r =
            Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng)).normalized().toRotationMatrix();
        const double s = scale(rng);
        const Point3 shift(5000.0 * normal(rng), 5000.0 * normal(rng), 5000.0 * normal(rng));
        Pose3D est;
        for (const auto& p : gt.joints) est.joints.push_back(s * r * p + shift);
        worst = std::max(worst, procrustes_error(gt, est));
    }

    // Translation invariance is checked bit-exactly on a 1/64 mm lattice where
    // every sum is representable.
    std::uniform_int_distribution<int> lattice(-65536, 65536);
    int inexact = 0;
    for (int t = 0; t < 1000; ++t) {
        Pose3D gt, est;
        for (int i = 0; i < 17; ++i) {
            gt.joints.emplace_back(lattice(rng) / 64.0, lattice(rng) / 64.0, lattice(rng) / 64.0);
            est.joints.emplace_back(lattice(rng) / 64.0, lattice(rng) / 64.0, lattice(rng) / 64.0);
        }
        const Point3 a(lattice(rng) / 8.0, lattice(rng), lattice(rng) / 64.0);
        const Point3 b(lattice(rng), lattice(rng) / 2.0, lattice(rng) / 16.0);
        const auto root = static_cast<std::size_t>(t % 17);
        inexact += mpjpe(translated(gt, a), translated(est, b), root) != mpjpe(gt, est, root);
        inexact += mpjpe(gt, translated(gt, a), root) != 0.0;
    }
    return {worst <= 1e-6 && inexact == 0,
            format("worst Procrustes error under similarity %.2e mm (limit 1e-6); %d inexact MPJPE translations",
                   worst, inexact)};
}

// ---------------------------------------------------------------------------
// 9. Single-frame latency.

Outcome criterion_throughput(Fixtures& fx) {
    const LifterModel& model = fx.lifter();
    // Heavy corruption; only frames that fill all N = 128 candidates are timed.
    DatasetSpec data = fx.spec.data;
    data.corruption.distractor_probability = 0.6;
    const auto frames = make_test_frames(data, derive_seed(fx.spec.seed, 900, 0), 200);
    const InferenceConfig config;  // N = 128, b = 3, lambda = 1, perspective
    const CameraModel camera = data.scene.camera;
    std::vector<double> ms;
    infer(frames.front().volume, model, config, camera);  // warm-up
    for (const auto& f : frames) {
        if (ms.size() == 50) break;
        const auto start = Clock::now();
        const InferenceResult r = infer(f.volume, model, config, camera);
        const double elapsed = 1000.0 * seconds_since(start);
        if (r.candidates.size() == config.candidates) ms.push_back(elapsed);
    }
    if (ms.size() < 50) return {false, format("only %zu of 200 frames produced 128 candidates", ms.size())};
    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double worst = sorted.back();
    const double mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    return {worst < 50.0,
            format("50 frames, M=17, N=128, 256-256 lifter: mean %.1f ms, median %.1f ms, slowest %.1f ms (limit 50 ms)",
                   mean, median, worst)};
}

// ---------------------------------------------------------------------------
// 10. CLI reproducibility.

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every regular file below `dir`, relative path -> contents.
std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).string(), slurp(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run(const std::string& command) {
    const int status = std::system((command + " > /dev/null 2>&1").c_str());
    return status;
}

Outcome criterion_cli(const Options& opt) {
    if (opt.cli.empty() || !fs::exists(opt.cli)) return {false, "CLI binary not found (pass --cli PATH)"};
    const std::string cli = opt.cli.string();
    std::vector<std::string> failures;
    std::vector<std::string> checked;
    std::vector<std::pair<std::string, std::string>> first_run;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path dir = opt.work / ("run" + std::to_string(pass));
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string d = dir.string();
        const std::vector<std::pair<std::string, std::string>> steps = {
            {"synth", cli + " synth --seed 5 --frames 40 --distractor-probability 0.15 --out " + d + "/train"},
            {"synth", cli + " synth --seed 6 --frames 12 --distractor-probability 0.15 --out " + d + "/test"},
            {"train-lifter", cli + " train-lifter --poses2d " + d + "/train/poses2d.jsonl --poses3d " + d +
                                 "/train/poses3d.jsonl --epochs 3 --hidden 32,32 --seed 9 --out " + d + "/model.plnt"},
            {"infer", cli + " infer --heatmaps " + d + "/test/manifest.txt --model " + d + "/model.plnt --camera " + d +
                          "/test/camera.json --candidates 16 --workers 1 --out " + d + "/pred"},
            {"infer", cli + " infer --heatmaps " + d + "/test/manifest.txt --model " + d + "/model.plnt --camera " + d +
                          "/test/camera.json --candidates 16 --workers 3 --out " + d + "/pred_mt"},
            {"eval", cli + " eval --gt " + d + "/test/poses3d.jsonl --pred " + d + "/pred/poses3d.jsonl --gt2d " + d +
                         "/test/poses2d.jsonl --pred2d " + d + "/pred/poses2d.jsonl --boxes " + d +
                         "/test/boxes.jsonl --out " + d + "/eval.json"},
            {"bench", cli + " bench --seed 11 --train-frames 60 --test-frames 10 --epochs 2 --hidden 16,16 "
                            "--bootstrap 50 --workers 2 --with-nms --out " + d + "/bench"},
        };
        for (const auto& [name, command] : steps) {
            if (run(command) != 0) failures.push_back(name + " failed: " + command);
            if (pass == 0) checked.push_back(name);
        }
        auto snap = snapshot(dir);
        if (pass == 0) {
            first_run = std::move(snap);
        } else if (snap != first_run) {
            failures.push_back("outputs differ between runs");
        }
        // Worker count must not change the predictions.
        if (slurp(dir / "pred" / "poses3d.jsonl") != slurp(dir / "pred_mt" / "poses3d.jsonl") ||
            slurp(dir / "pred" / "poses2d.jsonl") != slurp(dir / "pred_mt" / "poses2d.jsonl")) {
            failures.push_back("infer output depends on worker count");
        }
    }
    std::sort(checked.begin(), checked.end());
    checked.erase(std::unique(checked.begin(), checked.end()), checked.end());
    std::string names;
    for (const auto& c : checked) names += (names.empty() ? "" : ", ") + c;
    if (!failures.empty()) return {false, failures.front()};
    return {true, format("%zu output files byte-identical across two runs (%s)", first_run.size(), names.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) {
            opt.cli = argv[++i];
        } else if (a == "--work" && i + 1 < argc) {
            opt.work = argv[++i];
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) opt.only.insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: %s [--cli PATH] [--work DIR] [--only N[,N...]]\n", argv[0]);
            return 2;
        }
    }

    Fixtures fx;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"N-best exactness", criterion_nbest},
        {"mean-shift fidelity", criterion_mean_shift},
        {"gradient correctness", criterion_gradients},
        {"lifter learnability", [&] { return criterion_lifter(fx); }},
        {"prior effectiveness", [&] { return criterion_prior(fx); }},
        {"perspective/orthographic agreement", criterion_far_field},
        {"lambda=0 equals greedy decode", [&] { return criterion_greedy(fx); }},
        {"metric invariances", criterion_metrics},
        {"single-frame throughput", [&] { return criterion_throughput(fx); }},
        {"CLI reproducibility", [&] { return criterion_cli(opt); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!opt.only.empty() && !opt.only.contains(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
