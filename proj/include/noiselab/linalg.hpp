#pragma once

#include <Eigen/Dense>

namespace noiselab {

/// Sign/log-magnitude split of a determinant, so that |det| values far
/// outside double range remain representable. sign is 0 when the
/// factorization is numerically singular at the given tolerance.
struct LogDet {
  double log_abs = 0.0;
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// Largest row L1 norm; the scale against which pivots are judged.
double row_l1_scale(const Eigen::MatrixXd& a);

/// Log-determinant via LU with partial pivoting: accumulates log|u_ii| and a
/// sign from the pivots and the permutation parity. A pivot with
/// |u_ii| <= rel_tol * row_l1_scale(a) marks the matrix singular (sign 0).
LogDet log_det_lu(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

/// Plain product of LU pivots (permutation sign included); only safe when the
/// determinant magnitude fits a double comfortably.
double det_lu(const Eigen::MatrixXd& a);

bool is_full_rank(const Eigen::MatrixXd& a, double rel_tol);

}  // namespace noiselab
