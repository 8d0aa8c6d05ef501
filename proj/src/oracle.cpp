#include "noiselab/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "noiselab/error.hpp"
#include "noiselab/linalg.hpp"
#include "noiselab/quality.hpp"
#include "noiselab/rng.hpp"

namespace noiselab::oracle {

namespace {

double spd_log_det(const Eigen::MatrixXd& a) {
  const LogDet ld = log_det_lu(a);
  if (ld.sign <= 0) {
    fail(ErrorCode::NumericalSingularity,
         "covariance lost positive definiteness");
  }
  return ld.log_abs;
}

Eigen::MatrixXd conditional_cov(const Eigen::MatrixXd& cov_y,
                                const Eigen::MatrixXd& cov_z,
                                const Eigen::MatrixXd& cov_zy) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(cov_z);
  Eigen::MatrixXd cond = cov_y - cov_zy.transpose() * lu.solve(cov_zy);
  return 0.5 * (cond + cond.transpose());
}

/// 1/2 * ln( |cov_z| |cov_y - cov_yz cov_z^-1 cov_zy| /
///           (|cov_ze| |cov_y - cov_yze cov_ze^-1 cov_zey|) )
double gaussian_ratio(const Eigen::MatrixXd& cov_z,
                      const Eigen::MatrixXd& cov_y,
                      const Eigen::MatrixXd& cov_zy,
                      const Eigen::MatrixXd& cov_ze,
                      const Eigen::MatrixXd& cov_zey) {
  const double num =
      spd_log_det(cov_z) + spd_log_det(conditional_cov(cov_y, cov_z, cov_zy));
  const double den = spd_log_det(cov_ze) +
                     spd_log_det(conditional_cov(cov_y, cov_ze, cov_zey));
  return 0.5 * (num - den);
}

}  // namespace

double delta_s_gaussian_dense(const LabeledGaussianEnsemble& ensemble,
                              double sigma2_eps) {
  require(ensemble.size() <= 4096, ErrorCode::InvalidArgument,
          "dense oracle is limited to k <= 4096");
  const DenseCovarianceBundle b = dense_bundle(ensemble, sigma2_eps);
  return gaussian_ratio(b.sigma_z, b.sigma_y, b.sigma_zy,
                        *b.sigma_z_plus_eps, b.sigma_zy);
}

double sherman_morrison_check(const LabeledGaussianEnsemble& ensemble,
                              double sigma2_eps) {
  require(ensemble.size() <= 1024, ErrorCode::InvalidArgument,
          "sherman_morrison_check is limited to k <= 1024");
  require(std::isfinite(sigma2_eps) && sigma2_eps >= 0.0,
          ErrorCode::NegativeNoiseVariance,
          "sigma2_eps must be finite and >= 0");

  const int k = ensemble.size();
  const std::vector<double>& sz = ensemble.sigma2_z();

  // Rank-one-update route, scalar arithmetic only: with U = diag(sigma2_z)
  // and u the all-ones vector,
  //   (U + sigma2_eps u u^T)^-1
  //     = U^-1 - [sigma2_eps / (1 + sigma2_eps * sum_i 1/sigma2_z[i])]
  //       * U^-1 u u^T U^-1.
  double inv_sum = 0.0;
  for (int i = 0; i < k; ++i) inv_sum += 1.0 / sz[i];
  const double lambda = sigma2_eps / (1.0 + sigma2_eps * inv_sum);

  Eigen::MatrixXd update_inverse(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double value = -lambda / (sz[i] * sz[j]);
      if (i == j) value += 1.0 / sz[i];
      update_inverse(i, j) = value;
    }
  }

  const DenseCovarianceBundle b = dense_bundle(ensemble, sigma2_eps);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(*b.sigma_z_plus_eps);
  if (std::abs(lu.determinant()) == 0.0) {
    fail(ErrorCode::NumericalSingularity, "sigma_z_plus_eps not invertible");
  }
  const Eigen::MatrixXd direct_inverse =
      lu.solve(Eigen::MatrixXd::Identity(k, k));

  return (update_inverse - direct_inverse).cwiseAbs().maxCoeff();
}

double mc_delta_s_gaussian(const LabeledGaussianEnsemble& ensemble,
                           double sigma2_eps, std::int64_t n,
                           std::uint64_t seed) {
  require(n >= 10000, ErrorCode::SampleCountTooSmall,
          "Monte-Carlo estimate needs n >= 10^4");
  require(std::isfinite(sigma2_eps) && sigma2_eps >= 0.0,
          ErrorCode::NegativeNoiseVariance,
          "sigma2_eps must be finite and >= 0");

  const int k = ensemble.size();
  Rng rng(stream_seed(seed, 0x31c));
  const double eps_std = std::sqrt(sigma2_eps);

  std::vector<double> z_std(k), cov_over_std(k), cond_std(k);
  for (int i = 0; i < k; ++i) {
    z_std[i] = std::sqrt(ensemble.sigma2_z()[i]);
    cov_over_std[i] = ensemble.cov_zy()[i] / z_std[i];
    cond_std[i] = std::sqrt(ensemble.conditional_variance(i));
  }

  Eigen::VectorXd z(k), y(k), ze(k);
  Eigen::VectorXd sum_z = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd sum_ze = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd s_zz = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd s_yy = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd s_zy = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd s_zeze = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd s_zey = Eigen::MatrixXd::Zero(k, k);

  for (std::int64_t s = 0; s < n; ++s) {
    for (int i = 0; i < k; ++i) {
      const double a = rng.normal();
      const double b = rng.normal();
      z(i) = z_std[i] * a;
      y(i) = cov_over_std[i] * a + cond_std[i] * b;
    }
    const double eps = eps_std * rng.normal();  // one shared draw per sample
    ze = z.array() + eps;

    sum_z += z;
    sum_y += y;
    sum_ze += ze;
    s_zz.noalias() += z * z.transpose();
    s_yy.noalias() += y * y.transpose();
    s_zy.noalias() += z * y.transpose();
    s_zeze.noalias() += ze * ze.transpose();
    s_zey.noalias() += ze * y.transpose();
  }

  const double dn = static_cast<double>(n);
  const auto cov = [dn](const Eigen::MatrixXd& sum_xy,
                        const Eigen::VectorXd& sum_x,
                        const Eigen::VectorXd& sum_y_) {
    return (sum_xy - sum_x * sum_y_.transpose() / dn) / (dn - 1.0);
  };

  const Eigen::MatrixXd cov_z = cov(s_zz, sum_z, sum_z);
  const Eigen::MatrixXd cov_y = cov(s_yy, sum_y, sum_y);
  const Eigen::MatrixXd cov_zy = cov(s_zy, sum_z, sum_y);
  const Eigen::MatrixXd cov_ze = cov(s_zeze, sum_ze, sum_ze);
  const Eigen::MatrixXd cov_zey = cov(s_zey, sum_ze, sum_y);

  return gaussian_ratio(cov_z, cov_y, cov_zy, cov_ze, cov_zey);
}

double mc_linear_transform_check(int k, double alpha, std::int64_t n,
                                 std::uint64_t seed) {
  require(n >= 10000, ErrorCode::SampleCountTooSmall,
          "Monte-Carlo estimate needs n >= 10^4");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 0.49,
          ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 0.49]");

  const Eigen::MatrixXd transform =
      QualityMatrix::circular_shift(k, alpha).i_plus_q();

  Rng rng(stream_seed(seed, 0x11f));
  Eigen::VectorXd z(k), w(k);
  Eigen::VectorXd sum_z = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd sum_w = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd s_zz = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd s_ww = Eigen::MatrixXd::Zero(k, k);

  for (std::int64_t s = 0; s < n; ++s) {
    for (int i = 0; i < k; ++i) z(i) = rng.normal();
    w.noalias() = transform * z;
    sum_z += z;
    sum_w += w;
    s_zz.noalias() += z * z.transpose();
    s_ww.noalias() += w * w.transpose();
  }

  const double dn = static_cast<double>(n);
  const Eigen::MatrixXd cov_z =
      (s_zz - sum_z * sum_z.transpose() / dn) / (dn - 1.0);
  const Eigen::MatrixXd cov_w =
      (s_ww - sum_w * sum_w.transpose() / dn) / (dn - 1.0);

  return spd_log_det(cov_w) - spd_log_det(cov_z);
}

}  // namespace noiselab::oracle
