#include "noiselab/net.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "noiselab/error.hpp"
#include "noiselab/quality.hpp"

namespace noiselab::net {

namespace {

// Derived-stream tags for the per-run generator family.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kNoiseStream = 4;

int resolve_injection_layer(const NoiseSpec& noise, int hidden_count) {
  const int layer =
      noise.injection_layer < 0 ? hidden_count : noise.injection_layer;
  require(layer >= 0 && layer <= hidden_count, ErrorCode::DegenerateConfig,
          "injection layer must lie in [0, hidden_count]");
  return layer;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::GaussianAdditive: return "gaussian";
    case NoiseKind::LinearTransform: return "linear";
    case NoiseKind::SaltPepper: return "salt_pepper";
  }
  return "unknown";
}

std::string_view to_string(QKind kind) {
  return kind == QKind::CircularShift ? "circular" : "optimal";
}

double NoiseSpec::param() const {
  switch (kind) {
    case NoiseKind::GaussianAdditive: return sigma2_eps;
    case NoiseKind::LinearTransform:
      return q_kind == QKind::CircularShift ? alpha : 0.0;
    case NoiseKind::SaltPepper: return alpha;
  }
  return 0.0;
}

MlpModel MlpModel::init(std::vector<int> widths, std::uint64_t seed) {
  require(widths.size() >= 2, ErrorCode::DegenerateConfig,
          "model needs input and output widths");
  for (int w : widths) {
    require(w >= 1, ErrorCode::DegenerateConfig, "layer widths must be >= 1");
  }
  MlpModel model;
  model.widths = std::move(widths);
  Rng rng(stream_seed(seed, kInitStream));
  for (std::size_t l = 0; l + 1 < model.widths.size(); ++l) {
    const int in = model.widths[l];
    const int out = model.widths[l + 1];
    const double scale = std::sqrt(2.0 / in);
    Eigen::MatrixXd w(in, out);
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < out; ++j) w(i, j) = scale * rng.normal();
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::RowVectorXd::Zero(out));
  }
  return model;
}

std::size_t MlpModel::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    count += static_cast<std::size_t>(weights[l].size()) +
             static_cast<std::size_t>(biases[l].size());
  }
  return count;
}

Eigen::MatrixXd inject(const NoiseSpec& noise, const Eigen::MatrixXd& z,
                       Rng& rng, InjectRecord* record) {
  require(z.rows() >= 1, ErrorCode::BatchTooSmall, "empty batch");
  require(z.allFinite(), ErrorCode::NonFiniteInput,
          "activations must be finite");

  switch (noise.kind) {
    case NoiseKind::GaussianAdditive: {
      require(std::isfinite(noise.sigma2_eps) && noise.sigma2_eps >= 0.0,
              ErrorCode::NegativeNoiseVariance,
              "sigma2_eps must be finite and >= 0");
      if (noise.sigma2_eps == 0.0) return z;
      const double stddev = std::sqrt(noise.sigma2_eps);
      Eigen::MatrixXd out = z;
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
          out(i, j) += stddev * rng.normal();
        }
      }
      return out;
    }

    case NoiseKind::LinearTransform: {
      require(z.rows() >= 2, ErrorCode::BatchTooSmall,
              "linear-transform noise mixes samples and needs batch >= 2");
      const int batch = static_cast<int>(z.rows());
      if (noise.q_kind == QKind::CircularShift && noise.alpha == 0.0) {
        if (record) {
          record->linear = true;
          record->i_plus_q = Eigen::MatrixXd::Identity(batch, batch);
        }
        return z;
      }
      const QualityMatrix q =
          noise.q_kind == QKind::CircularShift
              ? QualityMatrix::circular_shift(batch, noise.alpha)
              : QualityMatrix::optimal(batch);
      Eigen::MatrixXd map = q.i_plus_q();
      Eigen::MatrixXd out = map * z;
      if (record) {
        record->linear = true;
        record->i_plus_q = std::move(map);
      }
      return out;
    }

    case NoiseKind::SaltPepper: {
      require(std::isfinite(noise.alpha) && noise.alpha >= 0.0 &&
                  noise.alpha < 1.0,
              ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1)");
      if (noise.alpha == 0.0) return z;
      Eigen::MatrixXd out = z;
      Eigen::MatrixXi source(z.rows(), z.cols());
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::Index max_col = 0, min_col = 0;
        z.row(i).maxCoeff(&max_col);
        z.row(i).minCoeff(&min_col);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
          const double p = rng.uniform();
          if (p < noise.alpha / 2.0) {
            out(i, j) = z(i, max_col);
            source(i, j) = static_cast<int>(max_col);
          } else if (p > 1.0 - noise.alpha / 2.0) {
            out(i, j) = z(i, min_col);
            source(i, j) = static_cast<int>(min_col);
          } else {
            source(i, j) = static_cast<int>(j);
          }
        }
      }
      if (record) {
        record->salted = true;
        record->source = std::move(source);
      }
      return out;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown noise kind");
}

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& x,
                        const NoiseSpec* noise, Rng* noise_rng,
                        ForwardCache* cache) {
  require(x.cols() == model.widths.front(), ErrorCode::ShapeMismatch,
          "input width does not match the model");
  require(noise == nullptr || noise_rng != nullptr, ErrorCode::InvalidArgument,
          "forward with noise needs a noise rng");

  const int hidden = model.hidden_count();
  const int inject_pos =
      noise ? resolve_injection_layer(*noise, hidden) : -1;
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->inject_record = InjectRecord{};
    cache->inject_position = inject_pos;
  }

  Eigen::MatrixXd a = x;
  for (int l = 0; l <= hidden; ++l) {
    if (noise && l == inject_pos) {
      a = inject(*noise, a, *noise_rng,
                 cache ? &cache->inject_record : nullptr);
    }
    if (cache) cache->inputs.push_back(a);
    Eigen::MatrixXd z = (a * model.weights[l]).rowwise() + model.biases[l];
    if (l < hidden) {
      if (cache) cache->pre.push_back(z);
      a = relu(z);
    } else {
      a = std::move(z);  // linear logits
    }
  }
  return a;
}

double softmax_cross_entropy(const Eigen::MatrixXd& logits,
                             const std::vector<int>& labels,
                             Eigen::MatrixXd* dlogits) {
  require(static_cast<std::size_t>(logits.rows()) == labels.size(),
          ErrorCode::ShapeMismatch, "one label per logits row");
  const Eigen::Index batch = logits.rows();
  double loss = 0.0;
  Eigen::MatrixXd probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double mx = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted =
        (logits.row(i).array() - mx).matrix();
    const double lse = std::log(shifted.array().exp().sum());
    loss -= shifted(labels[static_cast<std::size_t>(i)]) - lse;
    probs.row(i) = (shifted.array() - lse).exp().matrix();
  }
  loss /= static_cast<double>(batch);
  if (dlogits) {
    for (Eigen::Index i = 0; i < batch; ++i) {
      probs(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    *dlogits = probs / static_cast<double>(batch);
  }
  return loss;
}

namespace {

Eigen::MatrixXd inject_backward(const InjectRecord& record,
                                const Eigen::MatrixXd& grad_out) {
  if (record.linear) {
    return record.i_plus_q.transpose() * grad_out;
  }
  if (record.salted) {
    Eigen::MatrixXd grad_in =
        Eigen::MatrixXd::Zero(grad_out.rows(), grad_out.cols());
    for (Eigen::Index i = 0; i < grad_out.rows(); ++i) {
      for (Eigen::Index j = 0; j < grad_out.cols(); ++j) {
        grad_in(i, record.source(i, j)) += grad_out(i, j);
      }
    }
    return grad_in;
  }
  return grad_out;  // additive noise: identity Jacobian
}

}  // namespace

double loss_and_gradients(const MlpModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels,
                          const NoiseSpec* noise, Rng* noise_rng,
                          Gradients* grads, Eigen::MatrixXd* logits_out) {
  ForwardCache cache;
  const Eigen::MatrixXd logits = forward(model, x, noise, noise_rng, &cache);
  if (logits_out) *logits_out = logits;

  Eigen::MatrixXd dlogits;
  const double loss =
      softmax_cross_entropy(logits, labels, grads ? &dlogits : nullptr);
  if (!grads) return loss;

  const int hidden = model.hidden_count();
  grads->weights.assign(model.weights.size(), Eigen::MatrixXd());
  grads->biases.assign(model.biases.size(), Eigen::RowVectorXd());

  Eigen::MatrixXd grad = dlogits;
  for (int l = hidden; l >= 0; --l) {
    grads->weights[l] = cache.inputs[l].transpose() * grad;
    grads->biases[l] = grad.colwise().sum();
    if (l == 0) break;
    // inputs[l] = inject(relu(pre[l-1])) when the injection sits at l, so
    // the injection Jacobian applies before the rectifier mask.
    Eigen::MatrixXd grad_input = grad * model.weights[l].transpose();
    if (cache.inject_position == l) {
      grad_input = inject_backward(cache.inject_record, grad_input);
    }
    grad = ((cache.pre[l - 1].array() > 0.0).cast<double>() *
            grad_input.array())
               .matrix();
  }
  return loss;
}

double accuracy(const Eigen::MatrixXd& logits, const std::vector<int>& labels) {
  require(static_cast<std::size_t>(logits.rows()) == labels.size(),
          ErrorCode::ShapeMismatch, "one label per logits row");
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    if (static_cast<int>(arg) == labels[static_cast<std::size_t>(i)]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

namespace {

std::vector<std::vector<int>> make_batches(std::vector<int> order,
                                           int batch_size,
                                           bool merge_trailing_single) {
  std::vector<std::vector<int>> batches;
  for (std::size_t start = 0; start < order.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  // A trailing one-sample batch cannot be mixed by a linear transform; fold
  // it into the previous batch.
  if (merge_trailing_single && batches.size() > 1 &&
      batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back()[0]);
    batches.pop_back();
  }
  return batches;
}

void gather(const Eigen::MatrixXd& x, const std::vector<int>& y,
            const std::vector<int>& rows, Eigen::MatrixXd* bx,
            std::vector<int>* by) {
  bx->resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  by->resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bx->row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    (*by)[i] = y[static_cast<std::size_t>(rows[i])];
  }
}

}  // namespace

RunRecord train(const TrainConfig& config) {
  require(config.epochs >= 1, ErrorCode::DegenerateConfig,
          "epochs must be >= 1");
  require(config.batch_size >= 1, ErrorCode::DegenerateConfig,
          "batch size must be >= 1");
  require(config.learning_rate > 0.0 && std::isfinite(config.learning_rate),
          ErrorCode::DegenerateConfig, "learning rate must be positive");
  require(config.momentum >= 0.0 && config.momentum < 1.0,
          ErrorCode::DegenerateConfig, "momentum must lie in [0, 1)");

  const bool linear_noise =
      config.noise && config.noise->kind == NoiseKind::LinearTransform;
  require(!linear_noise || config.batch_size >= 2, ErrorCode::BatchTooSmall,
          "linear-transform noise needs batch size >= 2");

  const auto start_time = std::chrono::steady_clock::now();

  Dataset data =
      make_blobs(config.dataset.classes, config.dataset.dim,
                 config.dataset.n_per_class, config.dataset.spread,
                 stream_seed(config.seed, kDataStream));

  std::vector<int> widths;
  widths.push_back(data.dim);
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(data.classes);
  MlpModel model = MlpModel::init(widths, config.seed);

  RunRecord record;
  record.config = config;
  record.seed = config.seed;
  if (record.config.noise) {
    record.config.noise->injection_layer =
        resolve_injection_layer(*record.config.noise, model.hidden_count());
  }
  const NoiseSpec* noise =
      record.config.noise ? &*record.config.noise : nullptr;

  Rng shuffle_rng(stream_seed(config.seed, kShuffleStream));
  Rng noise_rng(stream_seed(config.seed, kNoiseStream));

  Gradients velocity;
  velocity.weights.reserve(model.weights.size());
  velocity.biases.reserve(model.biases.size());
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    velocity.weights.push_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    velocity.biases.push_back(Eigen::RowVectorXd::Zero(model.biases[l].size()));
  }

  std::vector<int> order(static_cast<std::size_t>(data.train_x.rows()));
  std::iota(order.begin(), order.end(), 0);

  Eigen::MatrixXd bx;
  std::vector<int> by;
  Gradients grads;
  Eigen::MatrixXd logits;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    const auto batches =
        make_batches(order, config.batch_size, linear_noise);

    double loss_sum = 0.0;
    double correct_weight = 0.0;
    std::size_t seen = 0;
    for (const auto& batch : batches) {
      gather(data.train_x, data.train_y, batch, &bx, &by);
      const double loss =
          loss_and_gradients(model, bx, by, noise, &noise_rng, &grads, &logits);
      require(std::isfinite(loss), ErrorCode::NonFiniteLoss,
              "loss diverged at epoch " + std::to_string(epoch));
      loss_sum += loss * static_cast<double>(batch.size());
      correct_weight +=
          accuracy(logits, by) * static_cast<double>(batch.size());
      seen += batch.size();

      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        velocity.weights[l] = config.momentum * velocity.weights[l] -
                              config.learning_rate * grads.weights[l];
        velocity.biases[l] = config.momentum * velocity.biases[l] -
                             config.learning_rate * grads.biases[l];
        model.weights[l] += velocity.weights[l];
        model.biases[l] += velocity.biases[l];
      }
    }
    record.epochs.push_back(
        EpochMetrics{loss_sum / static_cast<double>(seen),
                     correct_weight / static_cast<double>(seen)});
  }

  // Evaluation applies the identical noise spec (train/infer symmetry).
  std::vector<int> test_order(static_cast<std::size_t>(data.test_x.rows()));
  std::iota(test_order.begin(), test_order.end(), 0);
  const auto test_batches =
      make_batches(test_order, config.batch_size, linear_noise);
  double correct_weight = 0.0;
  for (const auto& batch : test_batches) {
    gather(data.test_x, data.test_y, batch, &bx, &by);
    const Eigen::MatrixXd test_logits =
        forward(model, bx, noise, &noise_rng, nullptr);
    correct_weight +=
        accuracy(test_logits, by) * static_cast<double>(batch.size());
  }
  record.final_test_accuracy =
      correct_weight / static_cast<double>(data.test_x.rows());

  record.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  return record;
}

double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                      const std::vector<int>& labels, const NoiseSpec* noise,
                      double eps, std::uint64_t noise_seed) {
  require(model.parameter_count() <= 1000, ErrorCode::InvalidArgument,
          "gradient_check is meant for models with <= 1000 parameters");
  require(eps >= 1e-6 && eps <= 1e-4, ErrorCode::InvalidArgument,
          "eps must lie in [1e-6, 1e-4]");

  const auto eval = [&](const MlpModel& m) {
    Rng rng(noise_seed);  // identical realization on every call
    return loss_and_gradients(m, x, labels, noise, &rng, nullptr);
  };

  Gradients analytic;
  {
    Rng rng(noise_seed);
    loss_and_gradients(model, x, labels, noise, &rng, &analytic);
  }

  MlpModel probe = model;
  double max_rel = 0.0;
  const auto update = [&](double a, double* slot) {
    const double saved = *slot;
    *slot = saved + eps;
    const double up = eval(probe);
    *slot = saved - eps;
    const double down = eval(probe);
    *slot = saved;
    const double numeric = (up - down) / (2.0 * eps);
    require(std::isfinite(a) && std::isfinite(numeric),
            ErrorCode::NonFiniteGradient, "non-finite gradient encountered");
    const double rel =
        std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-2);
    max_rel = std::max(max_rel, rel);
  };

  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < probe.weights[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < probe.weights[l].cols(); ++j) {
        update(analytic.weights[l](i, j), &probe.weights[l](i, j));
      }
    }
    for (Eigen::Index j = 0; j < probe.biases[l].size(); ++j) {
      update(analytic.biases[l](j), &probe.biases[l](j));
    }
  }
  return max_rel;
}

}  // namespace noiselab::net
