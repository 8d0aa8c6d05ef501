#pragma once

#include <string_view>

#include "noiselab/ensemble.hpp"
#include "noiselab/quality.hpp"

namespace noiselab {

enum class NoiseClass { Positive, Harmful };

std::string_view to_string(NoiseClass c);

/// Signed entropy change in nats plus its classification. A positive change
/// means the noise lowered the task complexity; zero and negative changes
/// are harmful (ties go to Harmful).
struct EntropyChange {
  double delta_s = 0.0;
  NoiseClass classification = NoiseClass::Harmful;
};

/// Positive iff delta_s > 0. Rejects NaN/inf.
NoiseClass classify(double delta_s);

/// Task entropy of the labels given the samples under the diagonal Gaussian
/// model: (k/2)(1 + ln 2*pi) + (1/2) * sum_i ln(sigma2_y[i] -
/// cov_zy[i]^2 / sigma2_z[i]). Natural log; result in nats.
double task_entropy(const LabeledGaussianEnsemble& ensemble);

/// Entropy change from adding one shared Gaussian noise draw of variance
/// sigma2_eps to every latent sample:
///
///   delta_s = -1/2 * ln[(1 + sigma2_eps * S) * (1 + lambda * T)]
///   S       = sum_i 1 / sigma2_z[i]
///   T       = sum_i cov_i^2 / (sigma2_z[i] * (sigma2_z[i]*sigma2_y[i] - cov_i^2))
///   lambda  = sigma2_eps / (1 + sigma2_eps * S)
///
/// lambda carries sigma2_eps in both numerator and denominator: that is the
/// form the rank-one (Sherman-Morrison) update of the inverse produces, and
/// the dense-ratio oracle in oracle.hpp agrees with it to machine precision.
/// Strictly negative for sigma2_eps > 0; exactly zero at sigma2_eps = 0.
EntropyChange delta_s_gaussian_latent(const LabeledGaussianEnsemble& ensemble,
                                      double sigma2_eps);

/// M = 1 - (1 + sigma2_eps * S)(1 + lambda * T); shares the sign of
/// delta_s_gaussian_latent and vanishes with sigma2_eps.
double m_indicator(const LabeledGaussianEnsemble& ensemble, double sigma2_eps);

/// delta_s = -ln det(I + Q), via sign/log-magnitude LU. Errors out when
/// I + Q is numerically singular (SingularMatrix) or has a negative
/// determinant (NegativeDeterminant), which lies outside the formula's
/// domain.
EntropyChange delta_s_linear_latent(const QualityMatrix& q);

/// delta_s = -H(eps) for the three-outcome replacement noise {max with
/// alpha/2, min with alpha/2, untouched with 1-alpha}, H in nats with
/// 0*ln 0 = 0. alpha in [0, 1).
EntropyChange delta_s_salt_pepper_latent(double alpha);

/// Image-level Gaussian noise: delta_s = -1/2 * ln(1 + lambda * T) with the
/// ensemble's statistics read as per-pixel (X) moments. Non-positive; zero
/// iff sigma2_eps = 0 or every covariance vanishes.
EntropyChange delta_s_gaussian_image(const LabeledGaussianEnsemble& ensemble,
                                     double sigma2_eps);

/// Invertible linear maps of the inputs leave the conditional label
/// covariance unchanged: identically zero.
EntropyChange delta_s_linear_image();

/// Replacement noise independent of inputs and labels cancels in the
/// image-level conditional entropy: identically zero.
EntropyChange delta_s_salt_pepper_image();

}  // namespace noiselab
