#pragma once

#include <Eigen/Core>
#include <utility>

namespace gcreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column-orthonormal D x d matrix spanning a candidate active subspace.
/// Construction validates orthonormality, so a Basis is valid by type.
class Basis {
 public:
  /// Wraps a matrix that is already orthonormal. Throws DimensionError
  /// if d is not in [1, D], or Error if ||M^T M - I||_F > 1e-10.
  static Basis from_orthonormal(Matrix m);

  /// The d-dimensional identity embedding (first axis vectors).
  static Basis identity(int ambient_dim, int dim);

  const Matrix& matrix() const { return m_; }
  int ambient_dim() const { return static_cast<int>(m_.rows()); }
  int dim() const { return static_cast<int>(m_.cols()); }

 private:
  explicit Basis(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

struct Segment {
  Vector a;
  Vector b;
};

/// Capped cylinder of radius r around a segment. A point belongs iff it is
/// within r of the segment and lies between the two endpoint planes.
struct TubeSpec {
  Segment segment;
  double radius;  // > 0
};

/// Euclidean distance from p to the closed segment. The degenerate case
/// a == b returns ||p - a||.
double point_segment_distance(const Vector& p, const Segment& seg);

/// Membership test: distance <= r AND (p-a).(b-a) >= 0 AND (p-b).(a-b) >= 0.
bool tube_contains(const Vector& p, const TubeSpec& tube);

/// Orthonormalizes full-column-rank M, preserving its column space.
/// Throws RankDeficiencyError when the smallest singular value is below
/// 1e-12 times the largest.
Basis orthonormalize(const Matrix& m);

/// P = Phi Phi^T (symmetric, idempotent).
Matrix projection_matrix(const Basis& basis);

/// Spectral norm of the difference of projection matrices; equals the sine
/// of the largest canonical angle between the two spans. Requires equal d.
double projection_distance(const Basis& a, const Basis& b);

/// Eigenvectors of the d smallest eigenvalues of a symmetric matrix.
/// Returns the orthonormal frame and the d eigenvalues in ascending order.
/// Throws AsymmetryError / DimensionError on bad input.
std::pair<Basis, Vector> smallest_eigvecs(const Matrix& s, int d);

}  // namespace gcreg
