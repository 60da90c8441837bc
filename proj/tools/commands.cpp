#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plcrf/binary_io.hpp"
#include "plcrf/errors.hpp"
#include "plcrf/heatmap_io.hpp"
#include "plcrf/parallel.hpp"
#include "plcrf/pose_io.hpp"

namespace plcrf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void refuse_existing(const fs::path& path, bool overwrite) {
    if (!overwrite && fs::exists(path)) {
        throw UsageError("output '" + path.string() + "' already exists (pass --overwrite to replace it)");
    }
}

// Output directory built under a sibling name and renamed into place by
// commit(). Destruction without commit() removes the partial directory.
class StagedDirectory {
public:
    StagedDirectory(fs::path target, bool overwrite) : target_(std::move(target)) {
        refuse_existing(target_, overwrite);
        staging_ = target_;
        staging_ += ".partial";
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }
    StagedDirectory(const StagedDirectory&) = delete;
    StagedDirectory& operator=(const StagedDirectory&) = delete;
    ~StagedDirectory() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    const fs::path& path() const { return staging_; }

    void commit() {
        fs::remove_all(target_);
        fs::rename(staging_, target_);
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path staging_;
    bool committed_ = false;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json with_hash(json j) {
    j["hash"] = hex64(binary::fnv1a(j.dump()));
    return j;
}

json camera_json(const CameraModel& c) { return {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}}; }

json skeleton_json(const SkeletonSpec& s) {
    json ranges = json::array();
    for (const auto& r : s.ranges) {
        ranges.push_back({{r[0].min, r[0].max}, {r[1].min, r[1].max}, {r[2].min, r[2].max}});
    }
    json dirs = json::array();
    for (const auto& d : s.rest_directions) dirs.push_back({d.x(), d.y(), d.z()});
    return {{"names", s.names},
            {"parents", s.parents},
            {"bone_lengths", s.bone_lengths},
            {"rest_directions", dirs},
            {"ranges", ranges}};
}

json scene_json(const SceneSpec& s) {
    return {{"camera", camera_json(s.camera)},
            {"min_depth", s.min_depth},
            {"max_depth", s.max_depth},
            {"lateral_fraction", s.lateral_fraction},
            {"vertical_fraction", s.vertical_fraction}};
}

json box_json(const BoxPolicy& b) { return {{"margin", b.margin}, {"grid_size", b.grid_size}, {"sigma", b.sigma}}; }

json corruption_json(const CorruptionSpec& c) {
    return {{"distractor_probability", c.distractor_probability},
            {"min_offset", c.min_offset},
            {"max_offset", c.max_offset},
            {"strength", c.strength},
            {"noise_floor", c.noise_floor}};
}

json train_json(const LifterTrainConfig& t) {
    return {{"hidden_widths", t.hidden_widths},
            {"input_mode", t.input_mode == LifterInputMode::full ? "full" : "normalized"},
            {"learning_rate", t.learning_rate},
            {"momentum", t.momentum},
            {"epochs", t.epochs},
            {"input_noise", t.input_noise},
            {"batch_size", t.batch_size},
            {"seed", t.seed},
            {"halve_lr_on_increase", t.halve_lr_on_increase}};
}

json inference_json(const InferenceConfig& c) {
    return {{"lambda", c.lambda},
            {"bandwidth", c.bandwidth},
            {"candidates", c.candidates},
            {"prior", c.prior == PriorMode::perspective ? "perspective" : "orthographic"},
            {"generator", c.generator == CandidateGenerator::mean_shift ? "mean-shift" : "nms"},
            {"nms_upscale", c.nms_upscale}};
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string frame_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu.plhm", index);
    return buf;
}

}  // namespace

int run_synth(const SynthOptions& o) {
    if (o.frames == 0) throw UsageError("synth: --frames must be positive");
    o.data.skeleton.validate();
    o.data.scene.camera.validate();
    o.data.corruption.validate();
    if (!(o.data.scene.min_depth > 0.0) || o.data.scene.max_depth < o.data.scene.min_depth) {
        throw UsageError("synth: need 0 < min depth <= max depth");
    }
    if (o.data.box.grid_size < 2) throw UsageError("synth: grid size must be at least 2");

    StagedDirectory dir(o.out, o.overwrite);
    fs::create_directories(dir.path() / "heatmaps");
    std::vector<FramePose2D> poses2d;
    std::vector<FramePose3D> poses3d;
    std::vector<FrameBox> boxes;
    std::vector<ManifestEntry> manifest;
    std::size_t corrupted = 0;
    for (std::size_t k = 0; k < o.frames; ++k) {
        const SyntheticFrame f = generate_frame(o.data, o.seed, k);
        const fs::path rel = fs::path("heatmaps") / frame_name(k);
        write_heatmap_volume(dir.path() / rel, f.volume);
        poses2d.push_back({f.frame, f.pose2d});
        poses3d.push_back({f.frame, f.pose3d});
        boxes.push_back({f.frame, f.volume.box});
        manifest.push_back({f.frame, rel});
        for (bool c : f.corrupted) corrupted += c;
    }
    write_poses(dir.path() / "poses2d.jsonl", poses2d);
    write_poses(dir.path() / "poses3d.jsonl", poses3d);
    write_boxes(dir.path() / "boxes.jsonl", boxes);
    write_camera(dir.path() / "camera.json", o.data.scene.camera);
    write_file_atomic(dir.path() / "manifest.txt", format_manifest(manifest));

    const json provenance = {{"seed", o.seed},
                             {"frames", o.frames},
                             {"corrupted_joints", corrupted},
                             {"skeleton", with_hash(skeleton_json(o.data.skeleton))},
                             {"scene", with_hash(scene_json(o.data.scene))},
                             {"box_policy", with_hash(box_json(o.data.box))},
                             {"corruption", with_hash(corruption_json(o.data.corruption))}};
    write_json(dir.path() / "provenance.json", provenance);
    dir.commit();
    std::cerr << "synth: wrote " << o.frames << " frames to " << o.out.string() << "\n";
    return kSuccess;
}

int run_train(const TrainOptions& o) {
    o.train.validate();
    refuse_existing(o.out, o.overwrite);
    const auto p2 = read_poses_2d(o.poses2d);
    const auto p3 = read_poses_3d(o.poses3d);
    if (p2.size() != p3.size()) {
        throw DataError("train-lifter: " + std::to_string(p2.size()) + " 2D poses but " + std::to_string(p3.size()) +
                        " 3D poses");
    }
    std::vector<TrainingPair> pairs(p2.size());
    for (std::size_t k = 0; k < p2.size(); ++k) {
        if (p2[k].frame != p3[k].frame) {
            throw DataError("train-lifter: line " + std::to_string(k + 1) + " pairs frame " +
                            std::to_string(p2[k].frame) + " with frame " + std::to_string(p3[k].frame));
        }
        pairs[k] = {p2[k].pose, p3[k].pose};
    }

    const LifterTraining t = train_lifter(pairs, o.train);
    const json summary = {{"format_version", kLifterFormatVersion},
                          {"pairs", pairs.size()},
                          {"joints", t.model.joint_count()},
                          {"layer_sizes", t.model.layer_sizes()},
                          {"config", train_json(o.train)},
                          {"mean_offset_mm", {t.model.mean_offset.x(), t.model.mean_offset.y(), t.model.mean_offset.z()}},
                          {"output_scale_mm", t.model.output_scale},
                          {"final_loss", t.final_loss},
                          {"final_mse_mm2", t.final_mse_mm2},
                          {"epoch_loss", t.epoch_loss}};
    fs::path summary_path = o.out;
    summary_path += ".summary.json";
    write_json(summary_path, summary);
    save_lifter(o.out, t.model);
    std::cerr << "train-lifter: " << pairs.size() << " pairs, final MSE " << t.final_mse_mm2 << " mm^2\n";
    return kSuccess;
}

namespace {

struct FrameOutcome {
    bool ok = false;
    std::string error;
    InferenceResult result;
    BoundingBox box;
};

}  // namespace

int run_infer(const InferOptions& o) {
    o.config.validate();
    if (o.workers == 0) throw UsageError("infer: --workers must be positive");
    std::optional<CameraModel> camera;
    if (o.camera) camera = read_camera(*o.camera);
    if (o.config.prior == PriorMode::perspective && !camera) {
        throw UsageError("infer: the perspective prior needs --camera");
    }
    const LifterModel model = load_lifter(o.model);
    const auto manifest = read_manifest(o.heatmaps);
    StagedDirectory dir(o.out, o.overwrite);

    std::vector<FrameOutcome> outcomes(manifest.size());
    parallel_for(manifest.size(), o.workers, [&](std::size_t k) {
        FrameOutcome& out = outcomes[k];
        try {
            const HeatMapVolume volume = read_heatmap_volume(manifest[k].volume);
            out.box = volume.box;
            out.result = infer(volume, model, o.config, camera);
            out.ok = true;
        } catch (const Error& e) {
            out.error = e.what();
        }
    });

    std::vector<FramePose2D> poses2d;
    std::vector<FramePose3D> poses3d, absolute;
    std::vector<FrameBox> boxes;
    std::string records;
    std::size_t failed = 0;
    for (std::size_t k = 0; k < manifest.size(); ++k) {
        const std::int64_t frame = manifest[k].frame;
        const FrameOutcome& out = outcomes[k];
        json rec = {{"frame", frame}};
        if (!out.ok) {
            ++failed;
            std::cerr << "infer: frame " << frame << " failed: " << out.error << "\n";
            rec["status"] = "failed";
            rec["error"] = out.error;
        } else {
            const InferenceResult& r = out.result;
            const PoseCandidate& w = r.winner();
            poses2d.push_back({frame, r.pose2d});
            poses3d.push_back({frame, r.pose3d});
            absolute.push_back({frame, r.pose3d_absolute});
            boxes.push_back({frame, out.box});
            json energies = json::array();
            for (const auto& c : r.candidates) energies.push_back(c.energy);  // +inf is written as null
            rec["status"] = "ok";
            rec["best"] = r.best;
            rec["score"] = w.score;
            rec["prior"] = w.prior;
            rec["energy"] = w.energy;
            rec["candidates"] = r.candidates.size();
            rec["energies"] = std::move(energies);
        }
        records += rec.dump();
        records += '\n';
    }
    write_poses(dir.path() / "poses2d.jsonl", poses2d);
    write_poses(dir.path() / "poses3d.jsonl", poses3d);
    write_poses(dir.path() / "poses3d_absolute.jsonl", absolute);
    write_boxes(dir.path() / "boxes.jsonl", boxes);
    write_file_atomic(dir.path() / "inference.jsonl", records);
    write_json(dir.path() / "config.json", {{"inference", inference_json(o.config)}, {"frames", manifest.size()},
                                            {"failed_frames", failed}});
    dir.commit();
    std::cerr << "infer: " << manifest.size() - failed << " of " << manifest.size() << " frames ok\n";
    return failed == 0 ? kSuccess : kData;
}

namespace {

template <typename Record>
void check_alignment(const std::vector<Record>& gt, const std::vector<Record>& pred, const char* what) {
    if (gt.size() != pred.size()) {
        throw DataError(std::string("eval: ") + what + ": " + std::to_string(gt.size()) + " ground-truth frames but " +
                        std::to_string(pred.size()) + " predicted frames");
    }
    for (std::size_t k = 0; k < gt.size(); ++k) {
        if (gt[k].frame != pred[k].frame) {
            throw DataError(std::string("eval: ") + what + ": frame " + std::to_string(gt[k].frame) +
                            " is paired with frame " + std::to_string(pred[k].frame));
        }
    }
}

}  // namespace

int run_eval(const EvalOptions& o) {
    if (o.gt2d.has_value() != o.pred2d.has_value() || (o.gt2d && !o.boxes)) {
        throw UsageError("eval: the 2D metric needs --gt2d, --pred2d and --boxes together");
    }
    if (o.out) refuse_existing(*o.out, o.overwrite);
    const auto gt = read_poses_3d(o.gt);
    const auto pred = read_poses_3d(o.pred);
    check_alignment(gt, pred, "3D poses");
    if (gt.empty()) throw DataError("eval: no frames");

    std::vector<FramePose2D> gt2, pred2;
    std::vector<FrameBox> boxes;
    if (o.gt2d) {
        gt2 = read_poses_2d(*o.gt2d);
        pred2 = read_poses_2d(*o.pred2d);
        boxes = read_boxes(*o.boxes);
        check_alignment(gt2, pred2, "2D poses");
        if (gt2.size() != gt.size()) throw DataError("eval: 2D and 3D files cover different frames");
        if (boxes.size() != gt2.size()) throw DataError("eval: box file covers different frames");
        for (std::size_t k = 0; k < gt2.size(); ++k) {
            if (gt2[k].frame != gt[k].frame || boxes[k].frame != gt[k].frame) {
                throw DataError("eval: 2D, 3D and box files list frames in different orders");
            }
        }
    }

    const auto n = static_cast<double>(gt.size());
    double sum_mpjpe = 0.0, sum_sim = 0.0, sum_2d = 0.0;
    json frames = json::array();
    for (std::size_t k = 0; k < gt.size(); ++k) {
        const double e = mpjpe(gt[k].pose, pred[k].pose, o.root);
        const double s = procrustes_error(gt[k].pose, pred[k].pose);
        json rec = {{"frame", gt[k].frame}, {"mpjpe_mm", e}, {"similarity_mm", s}};
        sum_mpjpe += e;
        sum_sim += s;
        if (o.gt2d) {
            const double e2 = error_2d(image_to_crop_image(gt2[k].pose, boxes[k].box),
                                       image_to_crop_image(pred2[k].pose, boxes[k].box));
            rec["error_2d_px"] = e2;
            sum_2d += e2;
        }
        frames.push_back(std::move(rec));
    }
    json report = {{"frames", gt.size()}, {"root", o.root}, {"mpjpe_mm", sum_mpjpe / n}, {"similarity_mm", sum_sim / n}};
    if (o.gt2d) report["error_2d_px"] = sum_2d / n;
    report["per_frame"] = std::move(frames);
    if (o.out) {
        write_json(*o.out, report);
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return kSuccess;
}

int run_bench(const BenchOptions& o) {
    BenchmarkSpec spec = o.spec;
    InferenceConfig unary;
    unary.lambda = 0.0;
    InferenceConfig vp;
    InferenceConfig vo;
    vo.prior = PriorMode::orthographic;
    spec.configs = {{"U", unary}, {"U+V_p", vp}, {"U+V_o", vo}};
    if (o.with_nms) {
        InferenceConfig nms = unary;
        nms.generator = CandidateGenerator::nms;
        InferenceConfig nms_vp = vp;
        nms_vp.generator = CandidateGenerator::nms;
        spec.configs.push_back({"NMS U", nms});
        spec.configs.push_back({"NMS U+V_p", nms_vp});
    }
    spec.baseline = 0;
    spec.validate();

    std::optional<LifterModel> model;
    if (o.model) model = load_lifter(*o.model, spec.data.skeleton.joint_count());
    StagedDirectory dir(o.out, o.overwrite);
    const BenchmarkReport report = run_benchmark(spec, model);

    json j = json::parse(report.to_json());
    j["dataset"] = {{"skeleton", with_hash(skeleton_json(spec.data.skeleton))},
                    {"scene", with_hash(scene_json(spec.data.scene))},
                    {"box_policy", with_hash(box_json(spec.data.box))},
                    {"corruption", with_hash(corruption_json(spec.data.corruption))}};
    if (o.model) {
        j["training"] = {{"model", o.model->string()}};
    } else {
        LifterTrainConfig used = spec.train;
        used.seed = derive_seed(spec.seed, 300, 0);  // the stream run_benchmark draws from
        j["training"] = train_json(used);
    }
    j["bootstrap_resamples"] = spec.bootstrap_resamples;
    write_json(dir.path() / "report.json", j);
    write_file_atomic(dir.path() / "report.txt", report.to_table());
    dir.commit();
    std::cout << report.to_table();
    return kSuccess;
}

}  // namespace plcrf::cli
