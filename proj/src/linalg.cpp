#include "noiselab/linalg.hpp"

#include <cmath>

#include "noiselab/error.hpp"

namespace noiselab {

double row_l1_scale(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

LogDet log_det_lu(const Eigen::MatrixXd& a, double rel_tol) {
  require(a.rows() == a.cols(), ErrorCode::NonSquare,
          "log_det_lu requires a square matrix");
  const auto n = a.rows();
  if (n == 0) return {0.0, 1};

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  const double threshold = rel_tol * row_l1_scale(a);

  double log_abs = 0.0;
  int sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pivot = diag(i);
    if (std::abs(pivot) <= threshold) return {0.0, 0};
    if (pivot < 0.0) sign = -sign;
    log_abs += std::log(std::abs(pivot));
  }
  return {log_abs, sign};
}

double det_lu(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols(), ErrorCode::NonSquare,
          "det_lu requires a square matrix");
  if (a.rows() == 0) return 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double det = static_cast<double>(lu.permutationP().determinant());
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < a.rows(); ++i) det *= diag(i);
  return det;
}

bool is_full_rank(const Eigen::MatrixXd& a, double rel_tol) {
  return log_det_lu(a, rel_tol).sign != 0;
}

}  // namespace noiselab
