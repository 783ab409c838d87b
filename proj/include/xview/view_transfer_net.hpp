#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace xview {

/// Four-layer fully connected regressor mapping a view-specific trajectory
/// histogram to its canonical-view counterpart. The first three layers use
/// sigmoid activation (with inverted dropout during training); the output
/// layer is affine. Concatenating the four layer activations at inference
/// yields the view-invariant RGB feature.
struct NetworkParams {
  std::array<Eigen::MatrixXd, 4> weights;  // layer l: widths[l] x widths[l-1]
  std::array<Eigen::VectorXd, 4> biases;

  int input_dim() const { return static_cast<int>(weights[0].cols()); }
  std::array<int, 4> widths() const {
    return {static_cast<int>(weights[0].rows()), static_cast<int>(weights[1].rows()),
            static_cast<int>(weights[2].rows()), static_cast<int>(weights[3].rows())};
  }
  int feature_dim() const {
    const auto w = widths();
    return w[0] + w[1] + w[2] + w[3];
  }
};

struct TrainConfig {
  std::array<int, 4> widths{1000, 1000, 2000, 2000};
  double initial_lr = 0.001;
  double lr_drop_factor = 10.0;
  int lr_drop_every = 1000;
  double weight_decay = 0.0005;
  int total_iters = 6000;
  double momentum = 0.9;
  int batch_size = 64;
  double dropout_rate = 0.5;
};

struct TrainingPair {
  Eigen::VectorXd input;   // view-specific histogram
  Eigen::VectorXd target;  // canonical-view histogram
};

enum class ForwardMode { kTrain, kInfer };

using LayerActivations = std::array<Eigen::VectorXd, 4>;

struct Gradients {
  std::array<Eigen::MatrixXd, 4> weights;
  std::array<Eigen::VectorXd, 4> biases;
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_trace;  // batch loss per iteration, pre-update
};

/// Xavier-uniform initialization with averaged fan: weights drawn from
/// [-sqrt(3/n), +sqrt(3/n)] where n = (fan_in + fan_out) / 2; biases zero.
/// Bit-deterministic per seed.
NetworkParams init_params(std::uint64_t seed, int input_dim, const std::array<int, 4>& widths);

/// Per-layer activations for one input. In train mode, inverted dropout
/// (mask then scale by 1/(1-rate)) is applied to the three sigmoid layers
/// using masks derived from `mask_seed`; in infer mode dropout is disabled
/// and the result does not depend on `mask_seed`.
LayerActivations forward(const NetworkParams& params, const Eigen::VectorXd& x,
                         ForwardMode mode, double dropout_rate = 0.0,
                         std::uint64_t mask_seed = 0);

/// Batch loss 1/(2N) * sum ||output - target||^2 and its gradients by
/// backpropagation through the same dropout masks the forward pass used.
/// Weight decay is applied in the SGD update, not folded into this loss.
double loss_and_gradients(const NetworkParams& params, const std::vector<TrainingPair>& batch,
                          double dropout_rate, std::uint64_t mask_seed, Gradients* grads);

/// initial_lr / lr_drop_factor^(iter / lr_drop_every)
double learning_rate_at(const TrainConfig& cfg, int iter);

/// SGD with momentum and weight decay: v <- mu*v - lr*(g + decay*w),
/// w <- w + v (decay on weights only). Batches come from a seeded shuffle;
/// the result is bit-deterministic per (pairs, cfg, seed).
TrainResult sgd_train(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg,
                      std::uint64_t seed);

/// Dropout-free forward pass, four activations concatenated in layer order.
Eigen::VectorXd extract_feature(const NetworkParams& params, const Eigen::VectorXd& histogram);

/// Checkpoint format: one header line `viewnet <input_dim> <w1> <w2> <w3>
/// <w4>` followed by eight matrix blocks (W1, b1, ..., W4, b4) in the
/// shared text matrix format.
void save_network(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_network(const std::filesystem::path& path);

}  // namespace xview
