#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace noiselab::net {

/// Synthetic classification data: Gaussian clusters around distinct means,
/// already split 80/20 per class (stratified). Rows are samples.
struct Dataset {
  Eigen::MatrixXd train_x;
  std::vector<int> train_y;
  Eigen::MatrixXd test_x;
  std::vector<int> test_y;
  int classes = 0;
  int dim = 0;
};

/// Cluster means sit on a radius-3 circle in the first two coordinates
/// (zero elsewhere), so they are distinct for any class count; points are
/// mean + spread * standard normal. Deterministic per seed.
Dataset make_blobs(int classes, int dim, int n_per_class, double spread,
                   std::uint64_t seed);

}  // namespace noiselab::net
