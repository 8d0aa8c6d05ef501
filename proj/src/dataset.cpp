#include "noiselab/dataset.hpp"

#include <cmath>
#include <numbers>

#include "noiselab/error.hpp"
#include "noiselab/rng.hpp"

namespace noiselab::net {

Dataset make_blobs(int classes, int dim, int n_per_class, double spread,
                   std::uint64_t seed) {
  require(classes >= 2, ErrorCode::DegenerateConfig, "need at least 2 classes");
  require(dim >= 2, ErrorCode::DegenerateConfig, "need input dimension >= 2");
  require(n_per_class >= 10, ErrorCode::DegenerateConfig,
          "need at least 10 samples per class");
  require(std::isfinite(spread) && spread > 0.0, ErrorCode::DegenerateConfig,
          "spread must be positive");

  const int n_train = n_per_class * 4 / 5;
  const int n_test = n_per_class - n_train;

  Dataset data;
  data.classes = classes;
  data.dim = dim;
  data.train_x.resize(static_cast<Eigen::Index>(n_train) * classes, dim);
  data.test_x.resize(static_cast<Eigen::Index>(n_test) * classes, dim);
  data.train_y.reserve(static_cast<std::size_t>(n_train) * classes);
  data.test_y.reserve(static_cast<std::size_t>(n_test) * classes);

  Rng rng(stream_seed(seed, 0xb10b));
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(dim);
  Eigen::RowVectorXd point(dim);

  int train_row = 0;
  int test_row = 0;
  for (int c = 0; c < classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / classes;
    mean.setZero();
    mean(0) = 3.0 * std::cos(angle);
    mean(1) = 3.0 * std::sin(angle);
    for (int s = 0; s < n_per_class; ++s) {
      for (int d = 0; d < dim; ++d) point(d) = mean(d) + spread * rng.normal();
      if (s < n_train) {
        data.train_x.row(train_row++) = point;
        data.train_y.push_back(c);
      } else {
        data.test_x.row(test_row++) = point;
        data.test_y.push_back(c);
      }
    }
  }
  return data;
}

}  // namespace noiselab::net
