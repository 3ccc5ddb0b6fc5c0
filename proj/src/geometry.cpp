#include "gcreg/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gcreg/errors.hpp"

namespace gcreg {

namespace {
constexpr double kOrthoTol = 1e-10;
}

Basis Basis::from_orthonormal(Matrix m) {
  const auto rows = m.rows();
  const auto cols = m.cols();
  if (cols < 1 || cols > rows) {
    throw DimensionError("Basis: need 1 <= d <= D, got D=" +
                         std::to_string(rows) + " d=" + std::to_string(cols));
  }
  if (!m.allFinite()) throw Error("Basis: non-finite entries");
  const Matrix gram = m.transpose() * m;
  const double defect =
      (gram - Matrix::Identity(cols, cols)).norm();  // Frobenius
  if (defect > kOrthoTol) {
    throw Error("Basis: columns not orthonormal (defect " +
                std::to_string(defect) + ")");
  }
  return Basis(std::move(m));
}

Basis Basis::identity(int ambient_dim, int dim) {
  return from_orthonormal(Matrix::Identity(ambient_dim, dim));
}

double point_segment_distance(const Vector& p, const Segment& seg) {
  const Vector v = seg.b - seg.a;
  const double len2 = v.squaredNorm();
  if (len2 == 0.0) return (p - seg.a).norm();
  double t = (p - seg.a).dot(v) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (seg.a + t * v)).norm();
}

bool tube_contains(const Vector& p, const TubeSpec& tube) {
  const Vector& a = tube.segment.a;
  const Vector& b = tube.segment.b;
  const Vector v = b - a;
  if ((p - a).dot(v) < 0.0) return false;
  if ((p - b).dot(-v) < 0.0) return false;
  return point_segment_distance(p, tube.segment) <= tube.radius;
}

Basis orthonormalize(const Matrix& m) {
  if (m.cols() < 1 || m.cols() > m.rows()) {
    throw DimensionError("orthonormalize: need 1 <= d <= D");
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw RankDeficiencyError("orthonormalize: columns numerically dependent");
  }
  // Thin QR; flipping columns to a positive R diagonal keeps an already
  // orthonormal input unchanged.
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  const Matrix& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return Basis::from_orthonormal(std::move(q));
}

Matrix projection_matrix(const Basis& basis) {
  return basis.matrix() * basis.matrix().transpose();
}

double projection_distance(const Basis& a, const Basis& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionError("projection_distance: ambient dimensions differ");
  }
  if (a.dim() != b.dim()) {
    throw DimensionError("projection_distance: subspace dimensions differ");
  }
  const Matrix diff = projection_matrix(a) - projection_matrix(b);
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<Basis, Vector> smallest_eigvecs(const Matrix& s, int d) {
  const auto n = s.rows();
  if (s.cols() != n) throw DimensionError("smallest_eigvecs: matrix not square");
  if (d < 1 || d > n) throw DimensionError("smallest_eigvecs: need 1 <= d <= D");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw AsymmetryError("smallest_eigvecs: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);  // ascending eigenvalues
  if (es.info() != Eigen::Success) {
    throw Error("smallest_eigvecs: eigensolver failed");
  }
  Matrix frame = es.eigenvectors().leftCols(d);
  Vector values = es.eigenvalues().head(d);
  return {Basis::from_orthonormal(std::move(frame)), std::move(values)};
}

}  // namespace gcreg
