#include "noiselab/ensemble.hpp"

#include <cmath>
#include <string>

#include "noiselab/error.hpp"
#include "noiselab/rng.hpp"

namespace noiselab {

LabeledGaussianEnsemble LabeledGaussianEnsemble::create(
    std::vector<double> sigma2_z, std::vector<double> sigma2_y,
    std::vector<double> cov_zy) {
  require(sigma2_z.size() == sigma2_y.size() &&
              sigma2_z.size() == cov_zy.size(),
          ErrorCode::LengthMismatch,
          "sigma2_z, sigma2_y and cov_zy must have equal length");
  require(!sigma2_z.empty(), ErrorCode::LengthMismatch,
          "ensemble needs at least one sample/label pair");

  for (std::size_t i = 0; i < sigma2_z.size(); ++i) {
    require(std::isfinite(sigma2_z[i]) && sigma2_z[i] > 0.0,
            ErrorCode::NonPositiveVariance,
            "sigma2_z[" + std::to_string(i) + "] must be positive");
    require(std::isfinite(sigma2_y[i]) && sigma2_y[i] > 0.0,
            ErrorCode::NonPositiveVariance,
            "sigma2_y[" + std::to_string(i) + "] must be positive");
    require(std::isfinite(cov_zy[i]), ErrorCode::NonFiniteInput,
            "cov_zy[" + std::to_string(i) + "] must be finite");
    const double rho2 =
        cov_zy[i] * cov_zy[i] / (sigma2_z[i] * sigma2_y[i]);
    require(rho2 < 1.0, ErrorCode::PerfectCorrelation,
            "pair " + std::to_string(i) +
                " has |rho| >= 1; conditional variance would vanish");
  }
  return LabeledGaussianEnsemble(std::move(sigma2_z), std::move(sigma2_y),
                                 std::move(cov_zy));
}

LabeledGaussianEnsemble LabeledGaussianEnsemble::random(int k,
                                                        std::uint64_t seed) {
  require(k >= 1, ErrorCode::LengthMismatch, "k must be at least 1");
  Rng rng(stream_seed(seed, 0x5e));
  std::vector<double> sigma2_z(k), sigma2_y(k), cov_zy(k);
  for (int i = 0; i < k; ++i) {
    sigma2_z[i] = rng.uniform(0.5, 2.5);
    sigma2_y[i] = rng.uniform(0.5, 2.5);
    const double rho = rng.uniform(-0.95, 0.95);
    cov_zy[i] = rho * std::sqrt(sigma2_z[i] * sigma2_y[i]);
  }
  return create(std::move(sigma2_z), std::move(sigma2_y), std::move(cov_zy));
}

DenseCovarianceBundle dense_bundle(const LabeledGaussianEnsemble& ensemble,
                                   std::optional<double> sigma2_eps) {
  const int k = ensemble.size();
  DenseCovarianceBundle bundle;
  bundle.sigma_z = Eigen::MatrixXd::Zero(k, k);
  bundle.sigma_y = Eigen::MatrixXd::Zero(k, k);
  bundle.sigma_zy = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    bundle.sigma_z(i, i) = ensemble.sigma2_z()[i];
    bundle.sigma_y(i, i) = ensemble.sigma2_y()[i];
    bundle.sigma_zy(i, i) = ensemble.cov_zy()[i];
  }
  if (sigma2_eps.has_value()) {
    require(std::isfinite(*sigma2_eps) && *sigma2_eps >= 0.0,
            ErrorCode::NegativeNoiseVariance,
            "sigma2_eps must be finite and >= 0");
    Eigen::MatrixXd zpe =
        Eigen::MatrixXd::Constant(k, k, *sigma2_eps);
    zpe += bundle.sigma_z;
    bundle.sigma_z_plus_eps = std::move(zpe);
  }
  return bundle;
}

}  // namespace noiselab
