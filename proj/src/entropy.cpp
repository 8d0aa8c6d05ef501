#include "noiselab/entropy.hpp"

#include <cmath>
#include <numbers>

#include "noiselab/error.hpp"
#include "noiselab/linalg.hpp"

namespace noiselab {

namespace {

constexpr double kSingularTol = 1e-9;

struct GaussianTerms {
  double inv_var_sum = 0.0;    // S
  double coupling_sum = 0.0;   // T
};

GaussianTerms gaussian_terms(const LabeledGaussianEnsemble& ensemble) {
  GaussianTerms t;
  for (int i = 0; i < ensemble.size(); ++i) {
    const double sz = ensemble.sigma2_z()[i];
    const double sy = ensemble.sigma2_y()[i];
    const double cov = ensemble.cov_zy()[i];
    t.inv_var_sum += 1.0 / sz;
    t.coupling_sum += cov * cov / (sz * (sz * sy - cov * cov));
  }
  return t;
}

void check_noise_variance(double sigma2_eps) {
  require(std::isfinite(sigma2_eps) && sigma2_eps >= 0.0,
          ErrorCode::NegativeNoiseVariance,
          "sigma2_eps must be finite and >= 0");
}

EntropyChange make_change(double delta_s) {
  if (delta_s == 0.0) delta_s = 0.0;  // normalize -0.0
  return EntropyChange{delta_s, classify(delta_s)};
}

}  // namespace

std::string_view to_string(NoiseClass c) {
  return c == NoiseClass::Positive ? "positive" : "harmful";
}

NoiseClass classify(double delta_s) {
  require(std::isfinite(delta_s), ErrorCode::NonFiniteInput,
          "delta_s must be finite");
  return delta_s > 0.0 ? NoiseClass::Positive : NoiseClass::Harmful;
}

double task_entropy(const LabeledGaussianEnsemble& ensemble) {
  const int k = ensemble.size();
  double log_cond = 0.0;
  for (int i = 0; i < k; ++i) {
    log_cond += std::log(ensemble.conditional_variance(i));
  }
  return 0.5 * k * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * log_cond;
}

EntropyChange delta_s_gaussian_latent(const LabeledGaussianEnsemble& ensemble,
                                      double sigma2_eps) {
  check_noise_variance(sigma2_eps);
  const GaussianTerms t = gaussian_terms(ensemble);
  const double first = 1.0 + sigma2_eps * t.inv_var_sum;
  const double lambda = sigma2_eps / first;
  const double second = 1.0 + lambda * t.coupling_sum;
  return make_change(-0.5 * (std::log(first) + std::log(second)));
}

double m_indicator(const LabeledGaussianEnsemble& ensemble,
                   double sigma2_eps) {
  check_noise_variance(sigma2_eps);
  const GaussianTerms t = gaussian_terms(ensemble);
  const double first = 1.0 + sigma2_eps * t.inv_var_sum;
  const double lambda = sigma2_eps / first;
  return 1.0 - first * (1.0 + lambda * t.coupling_sum);
}

EntropyChange delta_s_linear_latent(const QualityMatrix& q) {
  const LogDet ld = log_det_lu(q.i_plus_q(), kSingularTol);
  if (ld.sign == 0) {
    fail(ErrorCode::SingularMatrix,
         "I+Q is rank-deficient; -ln det(I+Q) is undefined");
  }
  if (ld.sign < 0) {
    fail(ErrorCode::NegativeDeterminant,
         "det(I+Q) is negative, outside the entropy-change domain");
  }
  return make_change(-ld.log_abs);
}

EntropyChange delta_s_salt_pepper_latent(double alpha) {
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0,
          ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1)");
  // Entropy of {alpha/2, alpha/2, 1-alpha} with the 0*ln 0 = 0 convention.
  double entropy = 0.0;
  if (alpha > 0.0) entropy -= alpha * std::log(alpha / 2.0);
  if (alpha < 1.0) entropy -= (1.0 - alpha) * std::log(1.0 - alpha);
  return make_change(-entropy);
}

EntropyChange delta_s_gaussian_image(const LabeledGaussianEnsemble& ensemble,
                                     double sigma2_eps) {
  check_noise_variance(sigma2_eps);
  const GaussianTerms t = gaussian_terms(ensemble);
  const double lambda = sigma2_eps / (1.0 + sigma2_eps * t.inv_var_sum);
  return make_change(-0.5 * std::log(1.0 + lambda * t.coupling_sum));
}

EntropyChange delta_s_linear_image() { return make_change(0.0); }

EntropyChange delta_s_salt_pepper_image() { return make_change(0.0); }

}  // namespace noiselab
