#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

namespace noiselab {

enum class QualityKind { CircularShift, Optimal, BackwardIdentity, Custom };

std::string_view to_string(QualityKind kind);

/// A k x k quality matrix Q defining linear-transform noise eps = Q z. The
/// transformed batch is (I + Q) z, so every property of interest (rank,
/// determinant, entropy change) is a property of I + Q.
class QualityMatrix {
 public:
  /// Q = alpha * U - alpha * I with U the one-step cyclic shift
  /// (U[i][j] = 1 iff j == i+1 mod k): diagonal -alpha, superdiagonal
  /// +alpha, +alpha in the bottom-left corner. k = 1 collapses to the zero
  /// matrix because U wraps onto the identity. alpha must lie in [0, 1].
  static QualityMatrix circular_shift(int k, double alpha);

  /// Q = diag(1/(k+1) - 1, ...) + (1/(k+1)) * ones, so that I + Q has
  /// 2/(k+1) on the diagonal and 1/(k+1) elsewhere.
  static QualityMatrix optimal(int k);

  /// Anti-diagonal ones (Q[i][j] = 1 iff i + j == k - 1, zero-based); I + Q
  /// is singular for every k >= 2 because rows i and k-1-i coincide. k = 1
  /// is rejected: there the backward identity equals the identity and
  /// I + Q = 2I is nonsingular, so it cannot demonstrate rank deficiency.
  static QualityMatrix backward_identity(int k);

  static QualityMatrix custom(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  QualityKind kind() const { return kind_; }

  /// Strength parameter for CircularShift; empty for other kinds.
  std::optional<double> alpha() const { return alpha_; }

  Eigen::MatrixXd i_plus_q() const {
    return Eigen::MatrixXd::Identity(size(), size()) + entries_;
  }

 private:
  QualityMatrix(Eigen::MatrixXd entries, QualityKind kind,
                std::optional<double> alpha)
      : entries_(std::move(entries)), kind_(kind), alpha_(alpha) {}

  Eigen::MatrixXd entries_;
  QualityKind kind_;
  std::optional<double> alpha_;
};

/// Outcome of checking a quality matrix against the four design constraints:
/// full rank of I+Q, row equivalence to the identity, row-wise diagonal
/// dominance of I+Q, and unit row L1 norm of I+Q.
///
/// Row equivalence is reported as invertibility of I+Q. A literal reading
/// (Q itself row-equivalent to I, i.e. Q invertible) is unsatisfiable by the
/// circular-shift and optimal constructions, whose Q has zero row sums;
/// invertibility of I+Q is the condition the entropy-change formula
/// -log|I+Q| actually needs.
struct ConstraintReport {
  bool full_rank = false;
  bool row_equivalent_to_identity = false;
  bool diagonal_dominant_rows = false;
  bool unit_row_l1 = false;
  std::optional<double> log_det_i_plus_q;
  bool overall = false;
};

/// Checks the constraint system on I+Q. Rank is judged by LU pivot
/// magnitudes: singular when the smallest |pivot| <= tol * (largest row L1
/// norm of I+Q). tol must be positive; the 1e-9 default keeps double LU
/// comfortably inside the threshold for k up to the thousands.
ConstraintReport validate(const QualityMatrix& q, double tol = 1e-9);
ConstraintReport validate(const Eigen::MatrixXd& q_entries, double tol = 1e-9);

/// (k-1) * ln(k+1), the entropy change attained by optimal(k).
double upper_bound(int k);

/// det(I + circular_shift(k, alpha)) by roots-of-unity factorization:
/// (1-alpha)^k - (-alpha)^k. Independent analytic route for cross-checking
/// the LU path.
double circulant_det_closed_form(int k, double alpha);

}  // namespace noiselab
