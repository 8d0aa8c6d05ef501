#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "noiselab/ensemble.hpp"
#include "noiselab/entropy.hpp"
#include "noiselab/error.hpp"
#include "noiselab/linalg.hpp"
#include "noiselab/oracle.hpp"
#include "noiselab/rng.hpp"

using namespace noiselab;

namespace {

void check_error(ErrorCode expected, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == expected);
  }
}

LabeledGaussianEnsemble unit_pair() {
  return LabeledGaussianEnsemble::create({1.0}, {1.0}, {0.0});
}

// Dense evaluation of the task entropy straight from the matrix definition.
double task_entropy_dense(const LabeledGaussianEnsemble& e) {
  const auto b = dense_bundle(e);
  const Eigen::MatrixXd cond =
      b.sigma_y -
      b.sigma_zy.transpose() * b.sigma_z.inverse() * b.sigma_zy;
  const LogDet ld = log_det_lu(cond);
  REQUIRE(ld.sign == 1);
  return 0.5 * e.size() * (1.0 + std::log(2.0 * std::numbers::pi)) +
         0.5 * ld.log_abs;
}

}  // namespace

TEST_CASE("task entropy of standard-normal pairs") {
  const double single = 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));
  CHECK(task_entropy(unit_pair()) == doctest::Approx(single).epsilon(1e-15));
  CHECK(task_entropy(unit_pair()) == doctest::Approx(1.41894).epsilon(1e-5));

  const auto two = LabeledGaussianEnsemble::create({1.0, 1.0}, {1.0, 1.0},
                                                   {0.0, 0.0});
  CHECK(task_entropy(two) == doctest::Approx(2.0 * single).epsilon(1e-15));
  CHECK(task_entropy(two) == doctest::Approx(2.83788).epsilon(1e-5));
}

TEST_CASE("task entropy agrees with the dense log-det route") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = LabeledGaussianEnsemble::random(3, seed);
    CHECK(std::abs(task_entropy(e) - task_entropy_dense(e)) <= 1e-9);
  }
}

TEST_CASE("gaussian latent entropy change") {
  SUBCASE("zero noise variance gives exactly zero") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto e = LabeledGaussianEnsemble::random(4, seed);
      const auto change = delta_s_gaussian_latent(e, 0.0);
      CHECK(change.delta_s == 0.0);
      CHECK(change.classification == NoiseClass::Harmful);
    }
  }

  SUBCASE("unit ensemble with unit noise") {
    const auto change = delta_s_gaussian_latent(unit_pair(), 1.0);
    CHECK(change.delta_s ==
          doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-15));
    CHECK(change.delta_s == doctest::Approx(-0.34657).epsilon(1e-4));
    CHECK(change.classification == NoiseClass::Harmful);
  }

  SUBCASE("matches the dense oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto e = LabeledGaussianEnsemble::random(2, seed);
      const double closed = delta_s_gaussian_latent(e, 0.3).delta_s;
      CHECK(std::abs(closed - oracle::delta_s_gaussian_dense(e, 0.3)) <= 1e-9);
    }
  }

  SUBCASE("rejects negative noise variance") {
    check_error(ErrorCode::NegativeNoiseVariance,
                [] { delta_s_gaussian_latent(unit_pair(), -1.0); });
  }

  SUBCASE("strictly negative for positive noise") {
    Rng rng(7);
    for (int c = 0; c < 200; ++c) {
      const int k = 1 + static_cast<int>(rng.below(8));
      const auto e = LabeledGaussianEnsemble::random(k, rng.next_u64());
      const double sigma2 = rng.uniform(1e-6, 2.0);
      CHECK(delta_s_gaussian_latent(e, sigma2).delta_s < 0.0);
    }
  }

  SUBCASE("strictly decreasing in the noise variance") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto e = LabeledGaussianEnsemble::random(3, seed);
      double previous = delta_s_gaussian_latent(e, 0.0).delta_s;
      for (double sigma2 = 0.25; sigma2 <= 4.0; sigma2 += 0.25) {
        const double current = delta_s_gaussian_latent(e, sigma2).delta_s;
        CHECK(current < previous);
        previous = current;
      }
    }
  }
}

TEST_CASE("m indicator") {
  CHECK(m_indicator(unit_pair(), 0.0) == 0.0);
  CHECK(m_indicator(unit_pair(), 1.0) == doctest::Approx(-1.0).epsilon(1e-15));

  Rng rng(13);
  for (int c = 0; c < 100; ++c) {
    const int k = 1 + static_cast<int>(rng.below(6));
    const auto e = LabeledGaussianEnsemble::random(k, rng.next_u64());
    const double sigma2 = rng.uniform(1e-4, 2.0);
    const double m = m_indicator(e, sigma2);
    const double ds = delta_s_gaussian_latent(e, sigma2).delta_s;
    CHECK(m < 0.0);
    CHECK(ds < 0.0);
  }
}

TEST_CASE("linear latent entropy change") {
  CHECK(delta_s_linear_latent(QualityMatrix::circular_shift(4, 0.0)).delta_s ==
        0.0);

  const auto half_shrink =
      QualityMatrix::custom(-0.5 * Eigen::MatrixXd::Identity(4, 4));
  const auto change = delta_s_linear_latent(half_shrink);
  CHECK(change.delta_s == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-13));
  CHECK(change.delta_s == doctest::Approx(2.77259).epsilon(1e-5));
  CHECK(change.classification == NoiseClass::Positive);

  const auto circ = delta_s_linear_latent(QualityMatrix::circular_shift(5, 0.3));
  CHECK(circ.delta_s == doctest::Approx(-std::log(0.17050)).epsilon(1e-12));
  CHECK(circ.delta_s == doctest::Approx(1.76904).epsilon(1e-5));

  check_error(ErrorCode::SingularMatrix, [] {
    delta_s_linear_latent(QualityMatrix::backward_identity(4));
  });
}

TEST_CASE("salt-and-pepper latent entropy change") {
  CHECK(delta_s_salt_pepper_latent(0.0).delta_s == 0.0);

  const auto half = delta_s_salt_pepper_latent(0.5);
  CHECK(half.delta_s ==
        doctest::Approx(-(2.0 * 0.25 * std::log(4.0) + 0.5 * std::log(2.0)))
            .epsilon(1e-14));
  CHECK(half.delta_s == doctest::Approx(-1.03972).epsilon(1e-5));
  CHECK(half.classification == NoiseClass::Harmful);

  CHECK(delta_s_salt_pepper_latent(0.999).delta_s < 0.0);

  for (double alpha = 0.05; alpha < 1.0; alpha += 0.05) {
    const double ds = delta_s_salt_pepper_latent(alpha).delta_s;
    CHECK(ds < 0.0);
    // independent route: literal -sum p ln p over the three outcomes
    double entropy = 0.0;
    for (double p : {alpha / 2.0, alpha / 2.0, 1.0 - alpha}) {
      if (p > 0.0) entropy -= p * std::log(p);
    }
    CHECK(std::abs(ds - (-entropy)) <= 1e-12);
  }

  check_error(ErrorCode::AlphaOutOfRange,
              [] { delta_s_salt_pepper_latent(1.0); });
  check_error(ErrorCode::AlphaOutOfRange,
              [] { delta_s_salt_pepper_latent(-0.1); });
}

TEST_CASE("gaussian image entropy change") {
  CHECK(delta_s_gaussian_image(unit_pair(), 0.0).delta_s == 0.0);

  const auto uncorrelated = LabeledGaussianEnsemble::create(
      {1.0, 2.0}, {1.5, 0.5}, {0.0, 0.0});
  CHECK(delta_s_gaussian_image(uncorrelated, 3.0).delta_s == 0.0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = LabeledGaussianEnsemble::random(2, seed);
    const double ds = delta_s_gaussian_image(e, 0.5).delta_s;
    CHECK(ds < 0.0);
    // dense route for the image-level ratio: only the conditional parts
    const auto b = dense_bundle(e, 0.5);
    const Eigen::MatrixXd cond0 =
        b.sigma_y -
        b.sigma_zy.transpose() * b.sigma_z.inverse() * b.sigma_zy;
    const Eigen::MatrixXd cond1 =
        b.sigma_y - b.sigma_zy.transpose() *
                        b.sigma_z_plus_eps->inverse() * b.sigma_zy;
    const double dense =
        0.5 * (log_det_lu(cond0).log_abs - log_det_lu(cond1).log_abs);
    CHECK(std::abs(ds - dense) <= 1e-9);
  }
}

TEST_CASE("image-level linear and salt-and-pepper changes are exactly zero") {
  for (int repeat = 0; repeat < 3; ++repeat) {
    const auto linear = delta_s_linear_image();
    CHECK(linear.delta_s == 0.0);
    CHECK(linear.classification == NoiseClass::Harmful);
    const auto salt = delta_s_salt_pepper_image();
    CHECK(salt.delta_s == 0.0);
    CHECK(salt.classification == NoiseClass::Harmful);
  }
}

TEST_CASE("classification rule") {
  CHECK(classify(0.1) == NoiseClass::Positive);
  CHECK(classify(0.0) == NoiseClass::Harmful);
  CHECK(classify(-3.0) == NoiseClass::Harmful);
  check_error(ErrorCode::NonFiniteInput, [] {
    classify(std::numeric_limits<double>::quiet_NaN());
  });
  check_error(ErrorCode::NonFiniteInput, [] {
    classify(std::numeric_limits<double>::infinity());
  });
}
