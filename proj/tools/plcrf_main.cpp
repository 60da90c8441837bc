#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "plcrf/errors.hpp"

namespace {

using namespace plcrf;
using namespace plcrf::cli;

const std::map<std::string, PriorMode> kPriors{{"perspective", PriorMode::perspective},
                                               {"orthographic", PriorMode::orthographic}};
const std::map<std::string, CandidateGenerator> kGenerators{{"mean-shift", CandidateGenerator::mean_shift},
                                                            {"nms", CandidateGenerator::nms}};
const std::map<std::string, LifterInputMode> kInputModes{{"full", LifterInputMode::full},
                                                         {"normalized", LifterInputMode::normalized_only}};

void add_training_options(CLI::App* cmd, LifterTrainConfig& t) {
    cmd->add_option("--hidden", t.hidden_widths, "Hidden layer widths, comma separated")->delimiter(',');
    cmd->add_option("--input-mode", t.input_mode, "Network input: full (x~, m, sigma) or normalized (x~ only)")
        ->transform(CLI::CheckedTransformer(kInputModes));
    cmd->add_option("--lr", t.learning_rate, "Learning rate");
    cmd->add_option("--momentum", t.momentum, "Momentum");
    cmd->add_option("--epochs", t.epochs, "Training epochs");
    cmd->add_option("--noise", t.input_noise, "Std of Gaussian noise added to normalized 2D inputs");
    cmd->add_option("--batch", t.batch_size, "Mini-batch size");
    cmd->add_flag("--halve-lr-on-increase", t.halve_lr_on_increase, "Halve the learning rate when the epoch loss rises");
}

void add_inference_options(CLI::App* cmd, InferenceConfig& c) {
    cmd->add_option("--lambda", c.lambda, "Weight of the 2D-3D consistency prior");
    cmd->add_option("--bandwidth", c.bandwidth, "Mean-shift kernel radius, grid pixels");
    cmd->add_option("--candidates", c.candidates, "Number of pose candidates N");
    cmd->add_option("--prior", c.prior, "Prior projection: perspective or orthographic")
        ->transform(CLI::CheckedTransformer(kPriors));
    cmd->add_option("--generator", c.generator, "Joint candidates: mean-shift or nms")
        ->transform(CLI::CheckedTransformer(kGenerators));
    cmd->add_option("--nms-upscale", c.nms_upscale, "Upsampling factor for the nms generator");
}

void add_dataset_options(CLI::App* cmd, DatasetSpec& d) {
    CameraModel& cam = d.scene.camera;
    cmd->add_option("--fx", cam.fx, "Focal length x, pixels");
    cmd->add_option("--fy", cam.fy, "Focal length y, pixels");
    cmd->add_option("--cx", cam.cx, "Principal point x, pixels");
    cmd->add_option("--cy", cam.cy, "Principal point y, pixels");
    cmd->add_option("--min-depth", d.scene.min_depth, "Nearest subject depth, mm");
    cmd->add_option("--max-depth", d.scene.max_depth, "Farthest subject depth, mm");
    cmd->add_option("--lateral-fraction", d.scene.lateral_fraction, "Horizontal root offset range / depth");
    cmd->add_option("--vertical-fraction", d.scene.vertical_fraction, "Vertical root offset range / depth");
    cmd->add_option("--grid", d.box.grid_size, "Heat-map grid size");
    cmd->add_option("--margin", d.box.margin, "Bounding-box margin");
    cmd->add_option("--sigma", d.box.sigma, "Ground-truth Gaussian width, grid pixels");
    cmd->add_option("--distractor-probability", d.corruption.distractor_probability, "Per-joint distractor probability");
    cmd->add_option("--distractor-strength", d.corruption.strength, "Distractor peak relative to the true peak");
    cmd->add_option("--min-offset", d.corruption.min_offset, "Minimum distractor offset, grid pixels");
    cmd->add_option("--max-offset", d.corruption.max_offset, "Maximum distractor offset, grid pixels");
    cmd->add_option("--noise-floor", d.corruption.noise_floor, "Uniform heat-map noise amplitude");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pose-lifting CRF: 2D/3D human pose estimation from joint heat maps"};
    app.set_config("--config", "", "TOML or INI config file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    SynthOptions synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_option("--seed", synth.seed, "Root seed");
    s->add_option("--frames", synth.frames, "Number of frames");
    s->add_flag("--overwrite", synth.overwrite, "Replace an existing output directory");
    add_dataset_options(s, synth.data);

    TrainOptions train;
    auto* t = app.add_subcommand("train-lifter", "Train the 2D-to-3D lifting network");
    t->add_option("--poses2d", train.poses2d, "2D poses (JSONL, image pixels)")->required()->check(CLI::ExistingFile);
    t->add_option("--poses3d", train.poses3d, "3D poses (JSONL, camera mm)")->required()->check(CLI::ExistingFile);
    t->add_option("--out", train.out, "Model file; a .summary.json sidecar is written next to it")->required();
    t->add_option("--seed", train.train.seed, "Seed for initialization, shuffling and noise");
    t->add_flag("--overwrite", train.overwrite, "Replace an existing model file");
    add_training_options(t, train.train);

    InferOptions infer;
    std::string camera_path;
    auto* i = app.add_subcommand("infer", "Estimate 2D and 3D poses from heat-map volumes");
    i->add_option("--heatmaps", infer.heatmaps, "Heat-map manifest")->required()->check(CLI::ExistingFile);
    i->add_option("--model", infer.model, "Lifter model file")->required()->check(CLI::ExistingFile);
    i->add_option("--camera", camera_path, "Camera file (required for the perspective prior)")
        ->check(CLI::ExistingFile);
    i->add_option("--out", infer.out, "Output directory")->required();
    i->add_option("--workers", infer.workers, "Worker threads");
    i->add_flag("--overwrite", infer.overwrite, "Replace an existing output directory");
    add_inference_options(i, infer.config);

    EvalOptions eval;
    std::string gt2d, pred2d, boxes, eval_out;
    auto* e = app.add_subcommand("eval", "Score predicted poses against ground truth");
    e->add_option("--gt", eval.gt, "Ground-truth 3D poses")->required()->check(CLI::ExistingFile);
    e->add_option("--pred", eval.pred, "Predicted 3D poses")->required()->check(CLI::ExistingFile);
    e->add_option("--gt2d", gt2d, "Ground-truth 2D poses (image pixels)")->check(CLI::ExistingFile);
    e->add_option("--pred2d", pred2d, "Predicted 2D poses (image pixels)")->check(CLI::ExistingFile);
    e->add_option("--boxes", boxes, "Per-frame bounding boxes for the 2D metric")->check(CLI::ExistingFile);
    e->add_option("--root", eval.root, "Root joint index");
    e->add_option("--out", eval_out, "Report file (default: standard output)");
    e->add_flag("--overwrite", eval.overwrite, "Replace an existing report file");

    BenchOptions bench;
    std::string bench_model;
    auto* b = app.add_subcommand("bench", "Train, infer and score on synthetic data with and without the prior");
    b->add_option("--out", bench.out, "Output directory for report.json and report.txt")->required();
    b->add_option("--seed", bench.spec.seed, "Root seed");
    b->add_option("--train-frames", bench.spec.train_frames, "Training poses");
    b->add_option("--test-frames", bench.spec.test_frames, "Test frames");
    b->add_option("--model", bench_model, "Use this lifter instead of training one")->check(CLI::ExistingFile);
    b->add_option("--bootstrap", bench.spec.bootstrap_resamples, "Bootstrap resamples");
    b->add_option("--workers", bench.spec.workers, "Worker threads");
    b->add_flag("--with-nms", bench.with_nms, "Add rows for the NMS candidate generator");
    b->add_flag("--overwrite", bench.overwrite, "Replace an existing output directory");
    add_dataset_options(b, bench.spec.data);
    add_training_options(b, bench.spec.train);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (s->parsed()) return run_synth(synth);
        if (t->parsed()) return run_train(train);
        if (i->parsed()) {
            if (!camera_path.empty()) infer.camera = camera_path;
            return run_infer(infer);
        }
        if (e->parsed()) {
            if (!gt2d.empty()) eval.gt2d = gt2d;
            if (!pred2d.empty()) eval.pred2d = pred2d;
            if (!boxes.empty()) eval.boxes = boxes;
            if (!eval_out.empty()) eval.out = eval_out;
            return run_eval(eval);
        }
        if (b->parsed()) {
            if (!bench_model.empty()) bench.model = bench_model;
            return run_bench(bench);
        }
    } catch (const UsageError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kUsage;
    } catch (const NumericalError& err) {
        std::fprintf(stderr, "numerical failure: %s\n", err.what());
        return kNumerical;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kData;
    }
    return kUsage;
}
