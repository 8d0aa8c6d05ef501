#include "noiselab/io.hpp"

#include <cstdio>
#include <fstream>

#include "noiselab/error.hpp"

namespace noiselab::io {

namespace {

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  return j;
}

std::vector<double> doubles(const nlohmann::json& j, const char* key) {
  require(j.contains(key), ErrorCode::InvalidArgument,
          std::string("missing field '") + key + "'");
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

ordered_json to_json(const LabeledGaussianEnsemble& ensemble) {
  return ordered_json{{"k", ensemble.size()},
                      {"sigma2_z", ensemble.sigma2_z()},
                      {"sigma2_y", ensemble.sigma2_y()},
                      {"cov_zy", ensemble.cov_zy()}};
}

LabeledGaussianEnsemble ensemble_from_json(const nlohmann::json& j) {
  auto ensemble = LabeledGaussianEnsemble::create(
      doubles(j, "sigma2_z"), doubles(j, "sigma2_y"), doubles(j, "cov_zy"));
  if (j.contains("k")) {
    require(j.at("k").get<int>() == ensemble.size(),
            ErrorCode::LengthMismatch, "'k' disagrees with vector lengths");
  }
  return ensemble;
}

LabeledGaussianEnsemble load_ensemble(const std::string& path) {
  return ensemble_from_json(parse_file(path));
}

ordered_json to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json to_json(const ConstraintReport& report) {
  ordered_json j{{"full_rank", report.full_rank},
                 {"row_equivalent_to_identity",
                  report.row_equivalent_to_identity},
                 {"diagonal_dominant_rows", report.diagonal_dominant_rows},
                 {"unit_row_l1", report.unit_row_l1},
                 {"log_det_i_plus_q", nullptr},
                 {"overall", report.overall}};
  if (report.log_det_i_plus_q) j["log_det_i_plus_q"] = *report.log_det_i_plus_q;
  return j;
}

ordered_json to_json(const net::NoiseSpec& noise) {
  ordered_json j{{"kind", std::string(net::to_string(noise.kind))}};
  switch (noise.kind) {
    case net::NoiseKind::GaussianAdditive:
      j["sigma2_eps"] = noise.sigma2_eps;
      break;
    case net::NoiseKind::LinearTransform:
      j["q_kind"] = std::string(net::to_string(noise.q_kind));
      if (noise.q_kind == net::QKind::CircularShift) j["alpha"] = noise.alpha;
      break;
    case net::NoiseKind::SaltPepper:
      j["alpha"] = noise.alpha;
      break;
  }
  j["injection_layer"] = noise.injection_layer;
  return j;
}

net::NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
  net::NoiseSpec noise;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    noise.kind = net::NoiseKind::GaussianAdditive;
    noise.sigma2_eps = j.value("sigma2_eps", 1.0);
  } else if (kind == "linear") {
    noise.kind = net::NoiseKind::LinearTransform;
    const std::string q = j.value("q_kind", "circular");
    if (q == "circular") {
      noise.q_kind = net::QKind::CircularShift;
      noise.alpha = j.value("alpha", 0.3);
    } else if (q == "optimal") {
      noise.q_kind = net::QKind::Optimal;
    } else {
      fail(ErrorCode::InvalidArgument, "unknown q_kind '" + q + "'");
    }
  } else if (kind == "salt_pepper") {
    noise.kind = net::NoiseKind::SaltPepper;
    noise.alpha = j.value("alpha", 0.3);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown noise kind '" + kind + "'");
  }
  noise.injection_layer = j.value("injection_layer", -1);
  return noise;
}

ordered_json to_json(const net::TrainConfig& config) {
  ordered_json j{{"epochs", config.epochs},
                 {"batch_size", config.batch_size},
                 {"learning_rate", config.learning_rate},
                 {"momentum", config.momentum},
                 {"seed", config.seed},
                 {"dataset",
                  ordered_json{{"classes", config.dataset.classes},
                               {"dim", config.dataset.dim},
                               {"n_per_class", config.dataset.n_per_class},
                               {"spread", config.dataset.spread}}},
                 {"hidden", config.hidden},
                 {"noise", nullptr}};
  if (config.noise) j["noise"] = to_json(*config.noise);
  return j;
}

net::TrainConfig train_config_from_json(const nlohmann::json& j) {
  net::TrainConfig config;
  config.epochs = j.value("epochs", config.epochs);
  config.batch_size = j.value("batch_size", config.batch_size);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.momentum = j.value("momentum", config.momentum);
  config.seed = j.value("seed", config.seed);
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    config.dataset.classes = d.value("classes", config.dataset.classes);
    config.dataset.dim = d.value("dim", config.dataset.dim);
    config.dataset.n_per_class =
        d.value("n_per_class", config.dataset.n_per_class);
    config.dataset.spread = d.value("spread", config.dataset.spread);
  }
  if (j.contains("hidden")) {
    config.hidden = j.at("hidden").get<std::vector<int>>();
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    config.noise = noise_spec_from_json(j.at("noise"));
  }
  return config;
}

net::TrainConfig load_train_config(const std::string& path) {
  return train_config_from_json(parse_file(path));
}

ordered_json to_json(const net::RunRecord& record, bool include_timings) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : record.epochs) {
    epochs.push_back(ordered_json{{"train_loss", e.train_loss},
                                  {"train_accuracy", e.train_accuracy}});
  }
  ordered_json j{{"config", to_json(record.config)},
                 {"epochs", std::move(epochs)},
                 {"final_test_accuracy", record.final_test_accuracy},
                 {"seed", record.seed}};
  if (include_timings) j["wall_time_seconds"] = record.wall_time_seconds;
  return j;
}

std::string csv_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

}  // namespace noiselab::io
