#include "xview/view_transfer_net.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "xview/errors.hpp"
#include "xview/matrix_io.hpp"
#include "xview/rng.hpp"

namespace xview {

namespace {

// stream tags for deriving independent sub-seeds
constexpr std::uint64_t kInitTag = 0x1a171;
constexpr std::uint64_t kShuffleTag = 0x5a0ff;
constexpr std::uint64_t kDropTag = 0xd509;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// Bernoulli keep-mask already scaled by 1/(1-rate). rate = 0 keeps all.
Eigen::VectorXd dropout_mask(Eigen::Index n, double rate, std::uint64_t seed) {
  Eigen::VectorXd mask(n);
  if (rate <= 0.0) {
    mask.setOnes();
    return mask;
  }
  Rng rng(seed);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < n; ++i)
    mask(i) = rng.uniform() >= rate ? scale : 0.0;
  return mask;
}

void check_widths(const std::array<int, 4>& widths) {
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("network widths must be positive");
}

void check_config(const TrainConfig& cfg) {
  check_widths(cfg.widths);
  // zero lr is legal (explicit no-op training); negative is not
  if (cfg.initial_lr < 0.0) throw std::invalid_argument("initial_lr must be >= 0");
  if (!(cfg.lr_drop_factor > 0.0)) throw std::invalid_argument("lr_drop_factor must be > 0");
  if (cfg.lr_drop_every < 1) throw std::invalid_argument("lr_drop_every must be >= 1");
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
  if (cfg.total_iters < 1) throw std::invalid_argument("total_iters must be >= 1");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
    throw std::invalid_argument("momentum must be in [0, 1)");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
    throw std::invalid_argument("dropout_rate must be in [0, 1)");
}

struct ForwardState {
  std::array<Eigen::VectorXd, 4> pre_dropout;  // sigmoid outputs h1..h3, affine h4
  std::array<Eigen::VectorXd, 4> post;         // after dropout (train) or = pre (infer)
  std::array<Eigen::VectorXd, 3> masks;
};

ForwardState forward_state(const NetworkParams& params, const Eigen::VectorXd& x,
                           ForwardMode mode, double dropout_rate, std::uint64_t mask_seed) {
  if (x.size() != params.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");

  ForwardState s;
  const Eigen::VectorXd* in = &x;
  for (int l = 0; l < 4; ++l) {
    Eigen::VectorXd z = params.weights[l] * (*in) + params.biases[l];
    if (l < 3) {
      s.pre_dropout[l] = sigmoid(z);
      if (mode == ForwardMode::kTrain && dropout_rate > 0.0) {
        s.masks[l] = dropout_mask(s.pre_dropout[l].size(), dropout_rate,
                                  mix_seed(mask_seed, static_cast<std::uint64_t>(l)));
        s.post[l] = s.pre_dropout[l].cwiseProduct(s.masks[l]);
      } else {
        s.masks[l] = Eigen::VectorXd::Ones(s.pre_dropout[l].size());
        s.post[l] = s.pre_dropout[l];
      }
    } else {
      s.pre_dropout[l] = std::move(z);  // output layer: affine, no dropout
      s.post[l] = s.pre_dropout[l];
    }
    in = &s.post[l];
  }
  return s;
}

}  // namespace

NetworkParams init_params(std::uint64_t seed, int input_dim, const std::array<int, 4>& widths) {
  if (input_dim < 1) throw std::invalid_argument("init_params: input_dim must be >= 1");
  check_widths(widths);

  NetworkParams p;
  int fan_in = input_dim;
  for (int l = 0; l < 4; ++l) {
    const int fan_out = widths[l];
    const double bound = std::sqrt(3.0 / (0.5 * (fan_in + fan_out)));
    Rng rng(mix_seed(seed, {kInitTag, static_cast<std::uint64_t>(l)}));
    p.weights[l].resize(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c)
        p.weights[l](r, c) = rng.uniform(-bound, bound);
    p.biases[l] = Eigen::VectorXd::Zero(fan_out);
    fan_in = fan_out;
  }
  return p;
}

LayerActivations forward(const NetworkParams& params, const Eigen::VectorXd& x,
                         ForwardMode mode, double dropout_rate, std::uint64_t mask_seed) {
  auto s = forward_state(params, x, mode, dropout_rate, mask_seed);
  return {std::move(s.post[0]), std::move(s.post[1]), std::move(s.post[2]),
          std::move(s.post[3])};
}

double loss_and_gradients(const NetworkParams& params, const std::vector<TrainingPair>& batch,
                          double dropout_rate, std::uint64_t mask_seed, Gradients* grads) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  const auto widths = params.widths();
  const double n = static_cast<double>(batch.size());

  if (grads) {
    for (int l = 0; l < 4; ++l) {
      grads->weights[l] = Eigen::MatrixXd::Zero(params.weights[l].rows(), params.weights[l].cols());
      grads->biases[l] = Eigen::VectorXd::Zero(params.biases[l].size());
    }
  }

  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& pair = batch[i];
    if (pair.target.size() != widths[3])
      throw std::invalid_argument("loss_and_gradients: target dimension mismatch");
    auto s = forward_state(params, pair.input, ForwardMode::kTrain, dropout_rate,
                           mix_seed(mask_seed, static_cast<std::uint64_t>(i)));

    const Eigen::VectorXd residual = s.post[3] - pair.target;
    loss += 0.5 * residual.squaredNorm() / n;
    if (!grads) continue;

    // delta for the affine output layer, then back through dropout+sigmoid
    Eigen::VectorXd delta = residual / n;
    for (int l = 3; l >= 0; --l) {
      const Eigen::VectorXd& layer_in = l == 0 ? pair.input : s.post[l - 1];
      grads->weights[l].noalias() += delta * layer_in.transpose();
      grads->biases[l] += delta;
      if (l == 0) break;
      Eigen::VectorXd up = params.weights[l].transpose() * delta;
      const auto& h = s.pre_dropout[l - 1];
      delta = up.cwiseProduct(s.masks[l - 1])
                  .cwiseProduct(h.cwiseProduct(Eigen::VectorXd::Ones(h.size()) - h));
    }
  }
  return loss;
}

double learning_rate_at(const TrainConfig& cfg, int iter) {
  if (iter < 0) throw std::invalid_argument("learning_rate_at: negative iteration");
  const int drops = iter / cfg.lr_drop_every;
  return cfg.initial_lr / std::pow(cfg.lr_drop_factor, drops);
}

TrainResult sgd_train(const std::vector<TrainingPair>& pairs, const TrainConfig& cfg,
                      std::uint64_t seed) {
  check_config(cfg);
  if (pairs.empty()) throw std::invalid_argument("sgd_train: no training pairs");
  const int input_dim = static_cast<int>(pairs[0].input.size());
  for (const auto& p : pairs) {
    if (p.input.size() != input_dim) throw std::invalid_argument("sgd_train: ragged inputs");
    if (p.target.size() != cfg.widths[3])
      throw std::invalid_argument("sgd_train: target dimension must equal the last width");
  }

  TrainResult result;
  result.params = init_params(mix_seed(seed, kInitTag), input_dim, cfg.widths);
  result.loss_trace.reserve(cfg.total_iters);

  Gradients velocity;
  for (int l = 0; l < 4; ++l) {
    velocity.weights[l] = Eigen::MatrixXd::Zero(result.params.weights[l].rows(),
                                                result.params.weights[l].cols());
    velocity.biases[l] = Eigen::VectorXd::Zero(result.params.biases[l].size());
  }

  Rng shuffle_rng(mix_seed(seed, kShuffleTag));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = order.size();  // forces a shuffle before the first batch
  const std::size_t batch_size = std::min<std::size_t>(cfg.batch_size, pairs.size());

  Gradients grads;
  std::vector<TrainingPair> batch(batch_size);
  for (int iter = 0; iter < cfg.total_iters; ++iter) {
    if (cursor + batch_size > order.size()) {
      // Fisher-Yates with the fixed stream; batches never straddle a shuffle
      for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[shuffle_rng.below(i + 1)]);
      cursor = 0;
    }
    for (std::size_t b = 0; b < batch_size; ++b) batch[b] = pairs[order[cursor + b]];
    cursor += batch_size;

    const double loss =
        loss_and_gradients(result.params, batch, cfg.dropout_rate,
                           mix_seed(seed, {kDropTag, static_cast<std::uint64_t>(iter)}), &grads);
    result.loss_trace.push_back(loss);

    const double lr = learning_rate_at(cfg, iter);
    for (int l = 0; l < 4; ++l) {
      velocity.weights[l] = cfg.momentum * velocity.weights[l] -
                            lr * (grads.weights[l] + cfg.weight_decay * result.params.weights[l]);
      result.params.weights[l] += velocity.weights[l];
      velocity.biases[l] = cfg.momentum * velocity.biases[l] - lr * grads.biases[l];
      result.params.biases[l] += velocity.biases[l];
    }
  }
  return result;
}

Eigen::VectorXd extract_feature(const NetworkParams& params, const Eigen::VectorXd& histogram) {
  const auto acts = forward(params, histogram, ForwardMode::kInfer);
  Eigen::VectorXd out(params.feature_dim());
  Eigen::Index at = 0;
  for (const auto& a : acts) {
    out.segment(at, a.size()) = a;
    at += a.size();
  }
  return out;
}

void save_network(const NetworkParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto w = params.widths();
  out << "viewnet " << params.input_dim() << ' ' << w[0] << ' ' << w[1] << ' ' << w[2] << ' '
      << w[3] << '\n';
  for (int l = 0; l < 4; ++l) {
    write_matrix_stream(out, params.weights[l]);
    write_matrix_stream(out, params.biases[l]);
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

NetworkParams load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw IoError(path.string() + ":1: missing header");
  std::istringstream hs(header);
  std::string magic;
  int input_dim = 0;
  std::array<int, 4> widths{};
  hs >> magic >> input_dim >> widths[0] >> widths[1] >> widths[2] >> widths[3];
  if (magic != "viewnet" || !hs || input_dim < 1)
    throw IoError(path.string() + ":1: not a viewnet checkpoint");
  check_widths(widths);

  NetworkParams p;
  int line_no = 1;
  int fan_in = input_dim;
  for (int l = 0; l < 4; ++l) {
    p.weights[l] = read_matrix_stream(in, line_no, path.string());
    Eigen::MatrixXd b = read_matrix_stream(in, line_no, path.string());
    if (p.weights[l].rows() != widths[l] || p.weights[l].cols() != fan_in || b.cols() != 1 ||
        b.rows() != widths[l])
      throw IoError(path.string() + ": checkpoint shapes do not match header");
    p.biases[l] = b.col(0);
    fan_in = widths[l];
  }
  return p;
}

}  // namespace xview
