#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace noiselab {

/// Second-moment description of k sample/label pairs under the diagonal
/// multivariate-Gaussian model: the pairs are mutually independent, so only
/// the per-index variances and the per-pair covariance are stored. Dense
/// matrices are materialized on demand (see dense_bundle).
///
/// Invariants, enforced at construction:
///   * sigma2_z[i] > 0 and sigma2_y[i] > 0 for every i,
///   * cov_zy[i]^2 < sigma2_z[i] * sigma2_y[i] strictly (every conditional
///     variance sigma2_y[i] - cov_zy[i]^2 / sigma2_z[i] is positive),
///   * all three vectors have length k >= 1.
class LabeledGaussianEnsemble {
 public:
  static LabeledGaussianEnsemble create(std::vector<double> sigma2_z,
                                        std::vector<double> sigma2_y,
                                        std::vector<double> cov_zy);

  /// Deterministic fixture generator: per index, latent and label variances
  /// are uniform on [0.5, 2.5] and the correlation coefficient is uniform on
  /// [-0.95, 0.95], keeping conditional variances well away from zero. Two
  /// calls with equal (k, seed) produce identical ensembles.
  static LabeledGaussianEnsemble random(int k, std::uint64_t seed);

  int size() const { return static_cast<int>(sigma2_z_.size()); }
  const std::vector<double>& sigma2_z() const { return sigma2_z_; }
  const std::vector<double>& sigma2_y() const { return sigma2_y_; }
  const std::vector<double>& cov_zy() const { return cov_zy_; }

  /// sigma2_y[i] - cov_zy[i]^2 / sigma2_z[i], strictly positive.
  double conditional_variance(int i) const {
    return sigma2_y_[i] - cov_zy_[i] * cov_zy_[i] / sigma2_z_[i];
  }

  double rho_squared(int i) const {
    return cov_zy_[i] * cov_zy_[i] / (sigma2_z_[i] * sigma2_y_[i]);
  }

 private:
  LabeledGaussianEnsemble(std::vector<double> sigma2_z,
                          std::vector<double> sigma2_y,
                          std::vector<double> cov_zy)
      : sigma2_z_(std::move(sigma2_z)),
        sigma2_y_(std::move(sigma2_y)),
        cov_zy_(std::move(cov_zy)) {}

  std::vector<double> sigma2_z_;
  std::vector<double> sigma2_y_;
  std::vector<double> cov_zy_;
};

/// Dense k x k covariance matrices assembled from an ensemble. sigma_z,
/// sigma_y and sigma_zy are diagonal; sigma_z_plus_eps, present when a noise
/// variance is supplied, has sigma2_z[i] + sigma2_eps on the diagonal and
/// sigma2_eps everywhere else (the rank-one structure of adding one shared
/// noise draw to every sample).
struct DenseCovarianceBundle {
  Eigen::MatrixXd sigma_z;
  Eigen::MatrixXd sigma_y;
  Eigen::MatrixXd sigma_zy;
  std::optional<Eigen::MatrixXd> sigma_z_plus_eps;
};

DenseCovarianceBundle dense_bundle(const LabeledGaussianEnsemble& ensemble,
                                   std::optional<double> sigma2_eps = {});

}  // namespace noiselab
