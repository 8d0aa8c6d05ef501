#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "noiselab/ensemble.hpp"
#include "noiselab/error.hpp"
#include "noiselab/linalg.hpp"
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

}  // namespace

TEST_CASE("constructor accepts an independent standard-normal pair") {
  const auto e = LabeledGaussianEnsemble::create({1.0}, {1.0}, {0.0});
  CHECK(e.size() == 1);
  CHECK(e.rho_squared(0) == 0.0);
  CHECK(e.conditional_variance(0) == 1.0);
}

TEST_CASE("constructor rejects perfect correlation") {
  check_error(ErrorCode::PerfectCorrelation, [] {
    LabeledGaussianEnsemble::create({1.0}, {1.0}, {1.0});
  });
  check_error(ErrorCode::PerfectCorrelation, [] {
    LabeledGaussianEnsemble::create({1.0, 2.0}, {1.0, 2.0}, {0.0, -2.0});
  });
}

TEST_CASE("constructor accepts a hand-checked k=3 ensemble") {
  const auto e = LabeledGaussianEnsemble::create(
      {2.0, 0.5, 1.3}, {1.1, 0.9, 2.2}, {0.4, -0.3, 0.8});
  CHECK(e.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(e.rho_squared(i) < 1.0);
    CHECK(e.conditional_variance(i) > 0.0);
  }
}

TEST_CASE("constructor rejects bad variances and mismatched lengths") {
  check_error(ErrorCode::NonPositiveVariance, [] {
    LabeledGaussianEnsemble::create({0.0}, {1.0}, {0.0});
  });
  check_error(ErrorCode::NonPositiveVariance, [] {
    LabeledGaussianEnsemble::create({1.0}, {-2.0}, {0.0});
  });
  check_error(ErrorCode::LengthMismatch, [] {
    LabeledGaussianEnsemble::create({1.0, 1.0}, {1.0}, {0.0});
  });
  check_error(ErrorCode::LengthMismatch, [] {
    LabeledGaussianEnsemble::create({}, {}, {});
  });
}

TEST_CASE("random ensembles are deterministic per (k, seed)") {
  const auto a = LabeledGaussianEnsemble::random(1, 42);
  const auto b = LabeledGaussianEnsemble::random(1, 42);
  CHECK(a.sigma2_z() == b.sigma2_z());
  CHECK(a.sigma2_y() == b.sigma2_y());
  CHECK(a.cov_zy() == b.cov_zy());

  const auto c = LabeledGaussianEnsemble::random(3, 1);
  const auto d = LabeledGaussianEnsemble::random(3, 2);
  CHECK(c.cov_zy() != d.cov_zy());
}

TEST_CASE("random ensembles respect the documented ranges") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto e = LabeledGaussianEnsemble::random(7, seed);
    for (int i = 0; i < e.size(); ++i) {
      CHECK(e.sigma2_z()[i] >= 0.5);
      CHECK(e.sigma2_z()[i] <= 2.5);
      CHECK(e.sigma2_y()[i] >= 0.5);
      CHECK(e.sigma2_y()[i] <= 2.5);
      CHECK(e.rho_squared(i) <= 0.95 * 0.95 + 1e-12);
    }
  }
}

TEST_CASE("dense bundle assembles the diagonal model") {
  const auto e = LabeledGaussianEnsemble::create({1.0}, {1.0}, {0.0});
  const auto b = dense_bundle(e, 0.0);
  REQUIRE(b.sigma_z_plus_eps.has_value());
  CHECK((*b.sigma_z_plus_eps)(0, 0) == 1.0);

  const auto e2 =
      LabeledGaussianEnsemble::create({1.0, 1.0}, {1.0, 1.0}, {0.0, 0.0});
  const auto b2 = dense_bundle(e2, 0.5);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.5, 0.5, 0.5, 1.5;
  CHECK((*b2.sigma_z_plus_eps - expected).cwiseAbs().maxCoeff() == 0.0);

  const auto b3 = dense_bundle(e2);
  CHECK_FALSE(b3.sigma_z_plus_eps.has_value());
  CHECK(b3.sigma_z.diagonal().minCoeff() == 1.0);
  CHECK(b3.sigma_zy.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense bundle rejects negative noise variance") {
  const auto e = LabeledGaussianEnsemble::create({1.0}, {1.0}, {0.0});
  check_error(ErrorCode::NegativeNoiseVariance,
              [&] { dense_bundle(e, -0.1); });
}

TEST_CASE("sigma_z_plus_eps matches the empirical covariance of Z + eps") {
  const auto e = LabeledGaussianEnsemble::random(3, 11);
  const double sigma2_eps = 0.2;
  const auto b = dense_bundle(e, sigma2_eps);

  const int n = 100000;
  Rng rng(2024);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();
  Eigen::Vector3d x;
  for (int s = 0; s < n; ++s) {
    const double eps = std::sqrt(sigma2_eps) * rng.normal();
    for (int i = 0; i < 3; ++i) {
      x(i) = std::sqrt(e.sigma2_z()[i]) * rng.normal() + eps;
    }
    sum += x;
    outer += x * x.transpose();
  }
  const Eigen::Matrix3d cov =
      (outer - sum * sum.transpose() / n) / (n - 1.0);
  CHECK((cov - *b.sigma_z_plus_eps).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sigma_z_plus_eps stays symmetric positive definite") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = LabeledGaussianEnsemble::random(6, seed);
    for (double sigma2 : {0.0, 0.1, 1.0, 10.0}) {
      const auto b = dense_bundle(e, sigma2);
      const Eigen::MatrixXd& m = *b.sigma_z_plus_eps;
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(log_det_lu(m).sign == 1);
      Eigen::LLT<Eigen::MatrixXd> llt(m);
      CHECK(llt.info() == Eigen::Success);
    }
  }
}
