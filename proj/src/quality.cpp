#include "noiselab/quality.hpp"

#include <cmath>
#include <string>

#include "noiselab/error.hpp"
#include "noiselab/linalg.hpp"

namespace noiselab {

std::string_view to_string(QualityKind kind) {
  switch (kind) {
    case QualityKind::CircularShift: return "circular_shift";
    case QualityKind::Optimal: return "optimal";
    case QualityKind::BackwardIdentity: return "backward_identity";
    case QualityKind::Custom: return "custom";
  }
  return "unknown";
}

QualityMatrix QualityMatrix::circular_shift(int k, double alpha) {
  require(k >= 1, ErrorCode::KTooSmall, "circular shift needs k >= 1");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
          ErrorCode::AlphaOutOfRange, "circular shift needs alpha in [0, 1]");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    q(i, i) -= alpha;
    q(i, (i + 1) % k) += alpha;
  }
  return QualityMatrix(std::move(q), QualityKind::CircularShift, alpha);
}

QualityMatrix QualityMatrix::optimal(int k) {
  require(k >= 1, ErrorCode::KTooSmall, "optimal quality matrix needs k >= 1");
  const double off = 1.0 / (k + 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(k, k, off);
  q.diagonal().array() += off - 1.0;
  return QualityMatrix(std::move(q), QualityKind::Optimal, std::nullopt);
}

QualityMatrix QualityMatrix::backward_identity(int k) {
  require(k >= 2, ErrorCode::KTooSmall,
          "backward identity needs k >= 2 (k = 1 gives a nonsingular I+Q)");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) q(i, k - 1 - i) = 1.0;
  return QualityMatrix(std::move(q), QualityKind::BackwardIdentity,
                       std::nullopt);
}

QualityMatrix QualityMatrix::custom(Eigen::MatrixXd entries) {
  require(entries.rows() == entries.cols(), ErrorCode::NonSquare,
          "quality matrix must be square");
  require(entries.rows() >= 1, ErrorCode::KTooSmall,
          "quality matrix needs k >= 1");
  require(entries.allFinite(), ErrorCode::NonFiniteInput,
          "quality matrix entries must be finite");
  return QualityMatrix(std::move(entries), QualityKind::Custom, std::nullopt);
}

ConstraintReport validate(const Eigen::MatrixXd& q_entries, double tol) {
  require(q_entries.rows() == q_entries.cols(), ErrorCode::NonSquare,
          "validate requires a square matrix");
  require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
  const int k = static_cast<int>(q_entries.rows());
  const Eigen::MatrixXd iq =
      Eigen::MatrixXd::Identity(k, k) + q_entries;

  ConstraintReport report;
  const LogDet ld = log_det_lu(iq, tol);
  report.full_rank = ld.sign != 0;
  report.row_equivalent_to_identity = report.full_rank;
  // log of |det|: defined whenever I+Q is nonsingular, even for the
  // negative-determinant matrices the entropy-change path rejects.
  if (report.full_rank) report.log_det_i_plus_q = ld.log_abs;

  report.diagonal_dominant_rows = true;
  report.unit_row_l1 = true;
  for (int i = 0; i < k && (report.diagonal_dominant_rows ||
                            report.unit_row_l1); ++i) {
    const double diag = iq(i, i);
    double l1 = 0.0;
    for (int j = 0; j < k; ++j) {
      l1 += std::abs(iq(i, j));
      if (j != i && iq(i, j) > diag + tol) {
        report.diagonal_dominant_rows = false;
      }
    }
    if (std::abs(l1 - 1.0) > tol) report.unit_row_l1 = false;
  }

  report.overall = report.full_rank && report.row_equivalent_to_identity &&
                   report.diagonal_dominant_rows && report.unit_row_l1;
  return report;
}

ConstraintReport validate(const QualityMatrix& q, double tol) {
  return validate(q.entries(), tol);
}

double upper_bound(int k) {
  require(k >= 1, ErrorCode::KTooSmall, "upper_bound needs k >= 1");
  return (k - 1) * std::log(static_cast<double>(k + 1));
}

double circulant_det_closed_form(int k, double alpha) {
  require(k >= 1, ErrorCode::KTooSmall,
          "circulant_det_closed_form needs k >= 1");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
          ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1]");
  // I + Q is circulant with symbol f(w) = (1-alpha) + alpha*w over the k-th
  // roots of unity; the product of f over all roots telescopes to
  // (1-alpha)^k - (-alpha)^k.
  return std::pow(1.0 - alpha, k) - std::pow(-alpha, k);
}

}  // namespace noiselab
