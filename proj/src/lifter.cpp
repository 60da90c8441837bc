#include "plcrf/lifter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "plcrf/binary_io.hpp"
#include "plcrf/errors.hpp"
#include "plcrf/pose_io.hpp"

namespace plcrf {

namespace {

constexpr std::string_view kMagic = "PLNT";

Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

Pose3D reshape_output(const Eigen::Ref<const Eigen::VectorXd>& column, double scale) {
    Pose3D pose;
    const Eigen::Index joints = column.size() / 3;
    pose.joints.reserve(static_cast<std::size_t>(joints));
    for (Eigen::Index j = 0; j < joints; ++j) pose.joints.push_back(scale * column.segment<3>(3 * j));
    return pose;
}

}  // namespace

std::size_t lifter_input_dimension(std::size_t joints, LifterInputMode mode) {
    return mode == LifterInputMode::full ? 2 * joints + 3 : 2 * joints;
}

Eigen::VectorXd lifter_input(const NormalizedPose2D& pose, LifterInputMode mode) {
    const std::size_t joints = pose.joints.size();
    Eigen::VectorXd in(static_cast<Eigen::Index>(lifter_input_dimension(joints, mode)));
    for (std::size_t i = 0; i < joints; ++i) in.segment<2>(static_cast<Eigen::Index>(2 * i)) = pose.joints[i];
    if (mode == LifterInputMode::full) {
        const auto base = static_cast<Eigen::Index>(2 * joints);
        in(base) = pose.mean.x();
        in(base + 1) = pose.mean.y();
        in(base + 2) = pose.scale;
    }
    return in;
}

LifterModel::LifterModel(std::size_t joints, std::vector<int> hidden_widths, LifterInputMode mode)
    : joints_(joints), mode_(mode) {
    if (joints == 0) throw DataError("lifter: joint count must be positive");
    sizes_.push_back(static_cast<int>(lifter_input_dimension(joints, mode)));
    for (int w : hidden_widths) {
        if (w <= 0) throw DataError("lifter: hidden widths must be positive");
        sizes_.push_back(w);
    }
    sizes_.push_back(static_cast<int>(3 * joints));
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        weights_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
        biases_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
    }
    input_shift = Eigen::VectorXd::Zero(sizes_.front());
    input_scale = Eigen::VectorXd::Ones(sizes_.front());
}

void LifterModel::initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(weights_[l].rows() + weights_[l].cols()));
        std::uniform_real_distribution<double> dist(-limit, limit);
        // Row-major fill so the draw order matches the serialized layout.
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = dist(rng);
        }
        biases_[l].setZero();
    }
}

Eigen::MatrixXd LifterModel::standardize(const Eigen::MatrixXd& raw_inputs) const {
    if (raw_inputs.rows() != input_shift.size()) throw DimensionMismatchError("lifter: input dimension mismatch");
    return (raw_inputs.colwise() - input_shift).array().colwise() / input_scale.array();
}

Eigen::MatrixXd LifterModel::forward_network(const Eigen::MatrixXd& standardized) const {
    Eigen::MatrixXd a = standardized;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z = weights_[l] * a;
        z.colwise() += biases_[l];
        a = (l + 1 < weights_.size()) ? relu(z) : std::move(z);
    }
    return a;
}

std::size_t LifterModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

// Layer by layer: weights row-major, then biases.
std::vector<double> LifterModel::parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) out.push_back(weights_[l](r, c));
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) out.push_back(biases_[l](r));
    }
    return out;
}

void LifterModel::set_parameters(std::span<const double> values) {
    if (values.size() != parameter_count()) throw DimensionMismatchError("lifter: parameter count mismatch");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = values[k++];
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = values[k++];
    }
}

void LifterModel::validate() const {
    if (joints_ == 0 || sizes_.size() < 2) throw DataError("lifter: empty model");
    if (static_cast<std::size_t>(sizes_.front()) != lifter_input_dimension(joints_, mode_) ||
        static_cast<std::size_t>(sizes_.back()) != 3 * joints_) {
        throw DimensionMismatchError("lifter: layer sizes do not match joint count");
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (weights_[l].rows() != sizes_[l + 1] || weights_[l].cols() != sizes_[l] ||
            biases_[l].size() != sizes_[l + 1]) {
            throw DimensionMismatchError("lifter: layer dimensions do not chain");
        }
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) throw NumericalError("lifter: non-finite parameter");
    }
    if (input_shift.size() != sizes_.front() || input_scale.size() != sizes_.front()) {
        throw DimensionMismatchError("lifter: input standardization size mismatch");
    }
    if (!input_shift.allFinite() || !(input_scale.array() > 0.0).all() || !input_scale.allFinite() ||
        !(output_scale > 0.0) || !std::isfinite(output_scale) || !mean_offset.allFinite()) {
        throw NumericalError("lifter: invalid normalization constants");
    }
}

std::vector<Pose3D> lift_normalized(const LifterModel& model, std::span<const NormalizedPose2D> poses) {
    std::vector<Pose3D> out;
    if (poses.empty()) return out;
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(model.input_dimension()), static_cast<Eigen::Index>(poses.size()));
    for (std::size_t k = 0; k < poses.size(); ++k) {
        if (poses[k].joints.size() != model.joint_count()) {
            throw DimensionMismatchError("lift: pose has " + std::to_string(poses[k].joints.size()) +
                                         " joints, model expects " + std::to_string(model.joint_count()));
        }
        raw.col(static_cast<Eigen::Index>(k)) = lifter_input(poses[k], model.input_mode());
    }
    const Eigen::MatrixXd y = model.forward_network(model.standardize(raw));
    out.reserve(poses.size());
    for (Eigen::Index k = 0; k < y.cols(); ++k) out.push_back(reshape_output(y.col(k), model.output_scale));
    return out;
}

Pose3D lift(const LifterModel& model, const Pose2D& pose) {
    if (pose.size() != model.joint_count()) {
        throw DimensionMismatchError("lift: pose has " + std::to_string(pose.size()) + " joints, model expects " +
                                     std::to_string(model.joint_count()));
    }
    const NormalizedPose2D normalized = normalize_pose(pose);
    return lift_normalized(model, std::span(&normalized, 1)).front();
}

Pose3D lift_absolute(const LifterModel& model, const Pose2D& pose) {
    return translated(lift(model, pose), model.mean_offset);
}

LossGradient loss_and_gradient(const LifterModel& model, const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets) {
    const std::size_t layers = model.layer_count();
    std::vector<Eigen::MatrixXd> activations;
    activations.reserve(layers + 1);
    activations.push_back(inputs);
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = model.weight(l) * activations.back();
        z.colwise() += model.bias(l);
        activations.push_back(l + 1 < layers ? relu(z) : std::move(z));
    }

    const double count = static_cast<double>(targets.cols());
    const Eigen::MatrixXd residual = activations.back() - targets;
    LossGradient out;
    out.loss = residual.squaredNorm() / count;

    std::vector<Eigen::MatrixXd> grad_w(layers);
    std::vector<Eigen::VectorXd> grad_b(layers);
    Eigen::MatrixXd delta = (2.0 / count) * residual;
    for (std::size_t l = layers; l-- > 0;) {
        grad_w[l] = delta * activations[l].transpose();
        grad_b[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = model.weight(l).transpose() * delta;
            delta = (activations[l].array() > 0.0).select(back, 0.0);
        }
    }

    out.gradient.reserve(model.parameter_count());
    for (std::size_t l = 0; l < layers; ++l) {
        for (Eigen::Index r = 0; r < grad_w[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < grad_w[l].cols(); ++c) out.gradient.push_back(grad_w[l](r, c));
        }
        for (Eigen::Index r = 0; r < grad_b[l].size(); ++r) out.gradient.push_back(grad_b[l](r));
    }
    return out;
}

double network_loss(const LifterModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    return (model.forward_network(inputs) - targets).squaredNorm() / static_cast<double>(targets.cols());
}

void LifterTrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw DataError("train config: learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw DataError("train config: momentum must be in [0, 1)");
    if (!(input_noise >= 0.0)) throw DataError("train config: noise must be non-negative");
    if (epochs < 0) throw DataError("train config: epochs must be non-negative");
    if (batch_size == 0) throw DataError("train config: batch size must be positive");
    for (int w : hidden_widths) {
        if (w <= 0) throw DataError("train config: hidden widths must be positive");
    }
}

LifterTraining train_lifter(std::span<const TrainingPair> pairs, const LifterTrainConfig& config) {
    config.validate();
    if (pairs.empty()) throw DataError("train_lifter: empty dataset");
    const std::size_t joints = pairs.front().pose2d.size();
    const std::size_t samples = pairs.size();

    LifterModel model(joints, config.hidden_widths, config.input_mode);
    const auto in_dim = static_cast<Eigen::Index>(model.input_dimension());
    const auto out_dim = static_cast<Eigen::Index>(3 * joints);
    const auto pose_dim = static_cast<Eigen::Index>(2 * joints);

    Eigen::MatrixXd raw_inputs(in_dim, static_cast<Eigen::Index>(samples));
    Eigen::MatrixXd targets(out_dim, static_cast<Eigen::Index>(samples));
    Point3 centroid_sum = Point3::Zero();
    for (std::size_t k = 0; k < samples; ++k) {
        const auto& pair = pairs[k];
        if (pair.pose2d.size() != joints || pair.pose3d.size() != joints) {
            throw DimensionMismatchError("train_lifter: sample " + std::to_string(k) + " has inconsistent joint count");
        }
        raw_inputs.col(static_cast<Eigen::Index>(k)) = lifter_input(normalize_pose(pair.pose2d), config.input_mode);
        const Point3 c = centroid(pair.pose3d);
        centroid_sum += c;
        for (std::size_t j = 0; j < joints; ++j) {
            targets.col(static_cast<Eigen::Index>(k)).segment<3>(static_cast<Eigen::Index>(3 * j)) =
                pair.pose3d.joints[j] - c;
        }
    }
    model.mean_offset = centroid_sum / static_cast<double>(samples);

    // x~ is already normalized and passes through unchanged; the absolute
    // position and scale entries are standardized with training statistics.
    for (Eigen::Index r = pose_dim; r < in_dim; ++r) {
        const double mean = raw_inputs.row(r).mean();
        const double var = (raw_inputs.row(r).array() - mean).square().mean();
        model.input_shift(r) = mean;
        model.input_scale(r) = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    const double target_rms = std::sqrt(targets.squaredNorm() / static_cast<double>(targets.size()));
    model.output_scale = target_rms > 1e-12 ? target_rms : 1.0;

    const Eigen::MatrixXd inputs = model.standardize(raw_inputs);
    const Eigen::MatrixXd net_targets = targets / model.output_scale;

    model.initialize(config.seed);
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> noise(0.0, config.input_noise);

    std::vector<double> params = model.parameters();
    std::vector<double> velocity(params.size(), 0.0);
    std::vector<std::size_t> order(samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    LifterTraining result;
    double lr = config.learning_rate;
    const std::size_t batch = std::min(config.batch_size, samples);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < samples; start += batch) {
            const std::size_t end = std::min(start + batch, samples);
            const auto cols = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd x(in_dim, cols);
            Eigen::MatrixXd t(out_dim, cols);
            for (Eigen::Index c = 0; c < cols; ++c) {
                const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(c)]);
                x.col(c) = inputs.col(src);
                t.col(c) = net_targets.col(src);
            }
            if (config.input_noise > 0.0) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    for (Eigen::Index r = 0; r < pose_dim; ++r) x(r, c) += noise(rng);
                }
            }
            const LossGradient lg = loss_and_gradient(model, x, t);
            if (!std::isfinite(lg.loss)) {
                throw NumericalError("train_lifter: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batches) + " (learning rate " + std::to_string(lr) + ")");
            }
            for (std::size_t p = 0; p < params.size(); ++p) {
                velocity[p] = config.momentum * velocity[p] + lg.gradient[p];
                params[p] -= lr * velocity[p];
            }
            model.set_parameters(params);
            epoch_loss += lg.loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);
        if (config.halve_lr_on_increase && !result.epoch_loss.empty() && epoch_loss > result.epoch_loss.back()) {
            lr *= 0.5;
        }
        result.epoch_loss.push_back(epoch_loss);
    }

    result.final_loss = network_loss(model, inputs, net_targets);
    if (!std::isfinite(result.final_loss)) throw NumericalError("train_lifter: non-finite final loss");
    result.final_mse_mm2 = result.final_loss * model.output_scale * model.output_scale / static_cast<double>(joints);
    model.validate();
    result.model = std::move(model);
    return result;
}

std::string serialize_lifter(const LifterModel& model) {
    model.validate();
    binary::Writer out;
    out.put_bytes(kMagic);
    out.put<std::uint32_t>(kLifterFormatVersion);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(model.joint_count()));
    out.put<std::uint32_t>(static_cast<std::uint32_t>(model.input_mode()));
    out.put<std::uint32_t>(static_cast<std::uint32_t>(model.layer_sizes().size()));
    for (int s : model.layer_sizes()) out.put<std::uint32_t>(static_cast<std::uint32_t>(s));
    for (int k = 0; k < 3; ++k) out.put<double>(model.mean_offset[k]);
    out.put<double>(model.output_scale);
    for (Eigen::Index r = 0; r < model.input_shift.size(); ++r) out.put<double>(model.input_shift(r));
    for (Eigen::Index r = 0; r < model.input_scale.size(); ++r) out.put<double>(model.input_scale(r));
    for (double p : model.parameters()) out.put<double>(p);
    const std::uint64_t checksum = binary::fnv1a(out.data());
    out.put<std::uint64_t>(checksum);
    return out.take();
}

LifterModel deserialize_lifter(const std::string& bytes, std::optional<std::size_t> expected_joints) {
    if (bytes.size() < kMagic.size() + 8) throw FormatError("lifter model: file truncated");
    if (std::string_view(bytes).substr(0, kMagic.size()) != kMagic) throw FormatError("lifter model: bad magic");

    binary::Reader in(bytes);
    in.get_bytes(kMagic.size());
    const auto version = in.get<std::uint32_t>();
    if (version != kLifterFormatVersion) {
        throw VersionMismatchError("lifter model: format version " + std::to_string(version) + ", expected " +
                                   std::to_string(kLifterFormatVersion));
    }
    if (bytes.size() < 8 + in.offset()) throw FormatError("lifter model: file truncated");
    const std::string_view body = std::string_view(bytes).substr(0, bytes.size() - 8);
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (binary::fnv1a(body) != stored) throw FormatError("lifter model: checksum mismatch (corrupt or truncated)");

    binary::Reader fields(body);
    fields.get_bytes(kMagic.size());
    fields.get<std::uint32_t>();
    const auto joints = fields.get<std::uint32_t>();
    const auto mode_raw = fields.get<std::uint32_t>();
    const auto size_count = fields.get<std::uint32_t>();
    if (mode_raw > 1) throw FormatError("lifter model: unknown input mode");
    if (size_count < 2 || size_count > 64) throw FormatError("lifter model: implausible layer count");
    std::vector<int> sizes(size_count);
    for (auto& s : sizes) s = static_cast<int>(fields.get<std::uint32_t>());
    const auto mode = static_cast<LifterInputMode>(mode_raw);

    if (expected_joints && *expected_joints != joints) {
        throw DimensionMismatchError("lifter model: file has " + std::to_string(joints) + " joints, expected " +
                                     std::to_string(*expected_joints));
    }
    if (joints == 0 || static_cast<std::size_t>(sizes.front()) != lifter_input_dimension(joints, mode) ||
        static_cast<std::size_t>(sizes.back()) != 3 * static_cast<std::size_t>(joints)) {
        throw DimensionMismatchError("lifter model: layer sizes inconsistent with joint count");
    }

    LifterModel model(joints, std::vector<int>(sizes.begin() + 1, sizes.end() - 1), mode);
    for (int k = 0; k < 3; ++k) model.mean_offset[k] = fields.get<double>();
    model.output_scale = fields.get<double>();
    for (Eigen::Index r = 0; r < model.input_shift.size(); ++r) model.input_shift(r) = fields.get<double>();
    for (Eigen::Index r = 0; r < model.input_scale.size(); ++r) model.input_scale(r) = fields.get<double>();
    std::vector<double> params(model.parameter_count());
    for (auto& p : params) p = fields.get<double>();
    if (fields.remaining() != 0) throw FormatError("lifter model: trailing bytes");
    model.set_parameters(params);
    model.validate();
    return model;
}

void save_lifter(const std::filesystem::path& path, const LifterModel& model) {
    write_file_atomic(path, serialize_lifter(model));
}

LifterModel load_lifter(const std::filesystem::path& path, std::optional<std::size_t> expected_joints) {
    return deserialize_lifter(read_file(path), expected_joints);
}

}  // namespace plcrf
