#pragma once

#include <cstdint>

#include "noiselab/ensemble.hpp"

namespace noiselab::oracle {

/// Latent-space Gaussian entropy change evaluated the long way, with dense
/// k x k matrices and LU log-determinants:
///
///   1/2 * [ ln|S_z| + ln|S_y - S_yz S_z^-1 S_zy|
///           - ln|S_z+eps| - ln|S_y - S_yz S_z+eps^-1 S_zy| ]
///
/// Arbitrates the closed form in entropy.hpp. k is capped at 4096 to bound
/// the dense factorizations.
double delta_s_gaussian_dense(const LabeledGaussianEnsemble& ensemble,
                              double sigma2_eps);

/// Max absolute elementwise difference between the rank-one-update inverse
/// of S_z+eps (diagonal inverse minus lambda * outer product, computed with
/// plain scalar loops) and a dense LU-factorized inverse. k capped at 1024.
double sherman_morrison_check(const LabeledGaussianEnsemble& ensemble,
                              double sigma2_eps);

/// Sampling estimator of the dense ratio: draws n i.i.d. (Z, Y, eps)
/// realizations from the ensemble's diagonal model (one shared noise scalar
/// per draw), forms unbiased (n-1) empirical covariances, and evaluates the
/// same ratio. Deterministic per seed; standard error shrinks as 1/sqrt(n).
/// n must be at least 10^4.
double mc_delta_s_gaussian(const LabeledGaussianEnsemble& ensemble,
                           double sigma2_eps, std::int64_t n,
                           std::uint64_t seed);

/// Empirical check of the change-of-variables fact behind the linear
/// entropy-change formula: returns ln|cov((I+Q)Z)| - ln|cov(Z)| from n
/// sampled standard-normal Z vectors, to be compared against
/// 2 * ln det(I+Q). Q is the circular shift at the given alpha (alpha in
/// [0, 0.49] so I+Q stays well-conditioned). Deterministic per seed.
double mc_linear_transform_check(int k, double alpha, std::int64_t n,
                                 std::uint64_t seed);

}  // namespace noiselab::oracle
