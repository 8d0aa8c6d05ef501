#pragma once

#include <string>

#include "json.hpp"
#include "noiselab/ensemble.hpp"
#include "noiselab/net.hpp"
#include "noiselab/quality.hpp"

namespace noiselab::io {

using ordered_json = nlohmann::ordered_json;

/// {"k": int, "sigma2_z": [...], "sigma2_y": [...], "cov_zy": [...]}
ordered_json to_json(const LabeledGaussianEnsemble& ensemble);
LabeledGaussianEnsemble ensemble_from_json(const nlohmann::json& j);
LabeledGaussianEnsemble load_ensemble(const std::string& path);

ordered_json to_json(const Eigen::MatrixXd& m);
ordered_json to_json(const ConstraintReport& report);

ordered_json to_json(const net::NoiseSpec& noise);
net::NoiseSpec noise_spec_from_json(const nlohmann::json& j);

ordered_json to_json(const net::TrainConfig& config);
net::TrainConfig train_config_from_json(const nlohmann::json& j);
net::TrainConfig load_train_config(const std::string& path);

/// include_timings adds the wall-clock field, which is the one
/// run-to-run-varying value; it is off by default so identical seeded runs
/// serialize to identical bytes.
ordered_json to_json(const net::RunRecord& record, bool include_timings = false);

/// Fixed-precision decimal text for CSV cells ("%.12g"): stable bytes for
/// identical doubles.
std::string csv_double(double value);

}  // namespace noiselab::io
