#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "noiselab/dataset.hpp"
#include "noiselab/rng.hpp"

namespace noiselab::net {

enum class NoiseKind { GaussianAdditive, LinearTransform, SaltPepper };
enum class QKind { CircularShift, Optimal };

std::string_view to_string(NoiseKind kind);
std::string_view to_string(QKind kind);

/// What to inject and where. The injection point indexes the activation fed
/// into affine layer p: 0 is the input itself, H (the hidden-layer count) is
/// the output of the last hidden activation. injection_layer = -1 resolves
/// to H when the spec is bound to a model.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::GaussianAdditive;
  double sigma2_eps = 1.0;                  // GaussianAdditive
  QKind q_kind = QKind::CircularShift;      // LinearTransform
  double alpha = 0.3;                       // CircularShift / SaltPepper
  int injection_layer = -1;

  /// The scalar strength knob for CSV reporting: sigma2_eps for Gaussian,
  /// alpha otherwise (0 for the optimal linear transform, which has none).
  double param() const;
};

/// Plain fully connected classifier: rectified hidden layers, linear logits.
/// weights[l] maps widths[l] -> widths[l+1]; rows of a batch are samples.
struct MlpModel {
  std::vector<int> widths;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::RowVectorXd> biases;

  /// He-scaled normal weights, zero biases, deterministic per seed.
  static MlpModel init(std::vector<int> widths, std::uint64_t seed);

  int hidden_count() const { return static_cast<int>(widths.size()) - 2; }
  std::size_t parameter_count() const;
};

struct DatasetSpec {
  int classes = 4;
  int dim = 8;
  int n_per_class = 100;
  double spread = 0.5;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  DatasetSpec dataset;
  std::vector<int> hidden{16};
  std::optional<NoiseSpec> noise;
};

/// Replay information captured by inject() so backpropagation can route
/// gradients through the exact realization that was applied.
struct InjectRecord {
  bool linear = false;
  Eigen::MatrixXd i_plus_q;   // LinearTransform: the applied batch map
  bool salted = false;
  Eigen::MatrixXi source;     // SaltPepper: source column per output element
};

/// Applies one noise realization to a batch x d activation block. Gaussian
/// adds i.i.d. N(0, sigma2_eps) per element; LinearTransform left-multiplies
/// by I+Q built for the actual batch size (needs batch >= 2); SaltPepper
/// replaces each element by its own row's max (p < alpha/2) or min
/// (p > 1 - alpha/2) with p uniform per element, max/min taken over the
/// original row. Zero-strength settings return the input bit-for-bit.
Eigen::MatrixXd inject(const NoiseSpec& noise, const Eigen::MatrixXd& z,
                       Rng& rng, InjectRecord* record = nullptr);

struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // activation fed into affine l
  std::vector<Eigen::MatrixXd> pre;     // pre-activation of hidden layer l
  InjectRecord inject_record;
  int inject_position = -1;
};

/// Affine/rectifier stack with the noise realization injected at the
/// resolved layer. noise may be null (clean forward); when noise is present
/// rng must be, too.
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& x,
                        const NoiseSpec* noise, Rng* noise_rng,
                        ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::RowVectorXd> biases;
};

/// Mean softmax cross-entropy; fills dlogits (already divided by the batch
/// size) when requested.
double softmax_cross_entropy(const Eigen::MatrixXd& logits,
                             const std::vector<int>& labels,
                             Eigen::MatrixXd* dlogits = nullptr);

/// One forward/backward pass; returns the mean loss. The injected noise is
/// whatever the rng state produces at entry, so seeding the rng freezes the
/// realization.
double loss_and_gradients(const MlpModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels,
                          const NoiseSpec* noise, Rng* noise_rng,
                          Gradients* grads,
                          Eigen::MatrixXd* logits_out = nullptr);

double accuracy(const Eigen::MatrixXd& logits, const std::vector<int>& labels);

struct EpochMetrics {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
};

struct RunRecord {
  TrainConfig config;          // snapshot, injection layer resolved
  std::vector<EpochMetrics> epochs;
  double final_test_accuracy = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Minibatch SGD with momentum. The same NoiseSpec drives both the training
/// batches and the final evaluation. Fully deterministic per config seed:
/// data, weight init, shuffling and noise each use their own derived stream,
/// so a zero-strength noise spec reproduces the clean run exactly.
RunRecord train(const TrainConfig& config);

/// Max over parameters of the relative error between the analytic gradient
/// and a central finite difference, with the noise realization frozen (the
/// noise stream is re-seeded identically for every evaluation). The
/// denominator is max(|analytic| + |numeric|, 1e-2), so tiny gradients are
/// compared absolutely. Model must have at most 10^3 parameters and eps must
/// lie in [1e-6, 1e-4].
double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                      const std::vector<int>& labels, const NoiseSpec* noise,
                      double eps, std::uint64_t noise_seed);

}  // namespace noiselab::net
