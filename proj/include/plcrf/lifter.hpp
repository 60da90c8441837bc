#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plcrf/geometry.hpp"

namespace plcrf {

// Which parts of the normalized 2D pose the network sees.
enum class LifterInputMode : std::uint32_t {
    full = 0,             // [x~_1x, x~_1y, ..., x~_Mx, x~_My, m_x, m_y, sigma]
    normalized_only = 1,  // [x~_1x, x~_1y, ..., x~_Mx, x~_My]
};

std::size_t lifter_input_dimension(std::size_t joints, LifterInputMode mode);

// Raw input vector for one normalized pose, before the model's affine input
// standardization.
Eigen::VectorXd lifter_input(const NormalizedPose2D& pose, LifterInputMode mode);

// Fully connected network: ReLU on hidden layers, identity on the output.
// Inputs are standardized with (input - input_shift) / input_scale before the
// first layer and outputs are multiplied by output_scale (mm per unit).
class LifterModel {
public:
    LifterModel() = default;

    // Zero-initialized network for `joints` joints with the given hidden
    // widths (possibly empty, giving a single affine layer).
    LifterModel(std::size_t joints, std::vector<int> hidden_widths, LifterInputMode mode = LifterInputMode::full);

    std::size_t joint_count() const { return joints_; }
    LifterInputMode input_mode() const { return mode_; }
    const std::vector<int>& layer_sizes() const { return sizes_; }
    std::size_t layer_count() const { return weights_.size(); }
    std::size_t input_dimension() const { return static_cast<std::size_t>(sizes_.front()); }

    Eigen::MatrixXd& weight(std::size_t layer) { return weights_[layer]; }
    const Eigen::MatrixXd& weight(std::size_t layer) const { return weights_[layer]; }
    Eigen::VectorXd& bias(std::size_t layer) { return biases_[layer]; }
    const Eigen::VectorXd& bias(std::size_t layer) const { return biases_[layer]; }

    Point3 mean_offset = Point3::Zero();
    double output_scale = 1.0;
    Eigen::VectorXd input_shift;
    Eigen::VectorXd input_scale;

    // Symmetric uniform fan-based initialization; biases set to zero.
    void initialize(std::uint64_t seed);

    // Network-space forward pass on standardized inputs (one column per
    // sample). Returns network-space outputs.
    Eigen::MatrixXd forward_network(const Eigen::MatrixXd& standardized) const;

    Eigen::MatrixXd standardize(const Eigen::MatrixXd& raw_inputs) const;

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> values);

    void validate() const;

private:
    std::size_t joints_ = 0;
    LifterInputMode mode_ = LifterInputMode::full;
    std::vector<int> sizes_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

// Zero-mean 3D pose (mm) for a 2D pose in original-image pixels.
Pose3D lift(const LifterModel& model, const Pose2D& pose);

// lift() plus the training-set mean subject position.
Pose3D lift_absolute(const LifterModel& model, const Pose2D& pose);

// Batched lift of already normalized poses; one output per input.
std::vector<Pose3D> lift_normalized(const LifterModel& model, std::span<const NormalizedPose2D> poses);

// Squared error of each pose vector in network space, summed over its 3M
// coordinates and averaged over the batch columns, and its gradient with
// respect to parameters() (same ordering).
struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};

LossGradient loss_and_gradient(const LifterModel& model, const Eigen::MatrixXd& standardized_inputs,
                               const Eigen::MatrixXd& network_targets);

double network_loss(const LifterModel& model, const Eigen::MatrixXd& standardized_inputs,
                    const Eigen::MatrixXd& network_targets);

struct LifterTrainConfig {
    std::vector<int> hidden_widths{256, 256};
    LifterInputMode input_mode = LifterInputMode::full;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    int epochs = 200;
    double input_noise = 0.1;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    // Halve the learning rate whenever the epoch loss goes up.
    bool halve_lr_on_increase = false;

    void validate() const;
};

struct TrainingPair {
    Pose2D pose2d;  // original-image pixels
    Pose3D pose3d;  // camera coordinates, mm
};

struct LifterTraining {
    LifterModel model;
    std::vector<double> epoch_loss;  // mean noisy mini-batch loss per epoch
    double final_loss = 0.0;         // noise-free loss on the training set
    double final_mse_mm2 = 0.0;      // mean squared per-joint distance, mm^2
};

LifterTraining train_lifter(std::span<const TrainingPair> pairs, const LifterTrainConfig& config);

// Binary model container: "PLNT", version, M, input mode, layer sizes,
// mean offset, output scale, input standardization, weights and biases
// (float64), then an FNV-1a 64 checksum of everything before it.
inline constexpr std::uint32_t kLifterFormatVersion = 1;

std::string serialize_lifter(const LifterModel& model);
LifterModel deserialize_lifter(const std::string& bytes, std::optional<std::size_t> expected_joints = std::nullopt);

void save_lifter(const std::filesystem::path& path, const LifterModel& model);
LifterModel load_lifter(const std::filesystem::path& path, std::optional<std::size_t> expected_joints = std::nullopt);

}  // namespace plcrf
