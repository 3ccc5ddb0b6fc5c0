#include "gcreg/tube_variance.hpp"

#include <cmath>
#include <stdexcept>

#include "gcreg/errors.hpp"

namespace gcreg {

double empirical_variance(std::span<const double> values) {
  const size_t m = values.size();
  if (m < 2) {
    throw InsufficientDataError("empirical_variance: need at least 2 values");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(m - 1);
}

namespace {

// Linear membership scan over the full dataset. Membership is the tube
// definition: both endpoint half-space conditions and squared distance to
// the segment's line at most r^2 (the half-space conditions make segment
// and line distance coincide). Calls on(k) for members in ascending k.
template <typename OnMember>
void scan_tube(const Dataset& data, int i, int j, double r, OnMember&& on) {
  const int n = data.size();
  const int D = data.dim();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw std::out_of_range("tube scan: sample index out of range");
  }
  if (i == j) throw std::invalid_argument("tube scan: i == j");
  if (!(r > 0.0)) throw std::invalid_argument("tube scan: radius must be > 0");

  const double* X = data.points_by_column().data();  // D x n, column-major
  const double* sq = data.squared_norms().data();
  const double* a = X + static_cast<size_t>(i) * D;
  const double* b = X + static_cast<size_t>(j) * D;

  double L2 = 0.0, av = 0.0, bv = 0.0;
  for (int t = 0; t < D; ++t) {
    const double v = b[t] - a[t];
    L2 += v * v;
    av += a[t] * v;
    bv += b[t] * v;
  }
  const double r2 = r * r;
  const double sq_a = sq[i];

  for (int k = 0; k < n; ++k) {
    const double* xk = X + static_cast<size_t>(k) * D;
    double xv = 0.0, xa = 0.0;
    for (int t = 0; t < D; ++t) {
      xv += xk[t] * (b[t] - a[t]);
      xa += xk[t] * a[t];
    }
    const double dot1 = xv - av;
    if (dot1 < 0.0) continue;
    if (bv - xv < 0.0) continue;
    double dist2 = sq[k] - 2.0 * xa + sq_a;
    if (L2 > 0.0) dist2 -= dot1 * dot1 / L2;
    if (dist2 <= r2) on(k);
  }
}

}  // namespace

TubeVarianceResult tube_variance(const Dataset& data, int i, int j, double r,
                                 std::vector<double>& scratch) {
  scratch.clear();
  const double* y = data.y().data();
  scan_tube(data, i, j, r, [&](int k) { scratch.push_back(y[k]); });
  TubeVarianceResult result;
  result.occupancy = static_cast<int>(scratch.size());
  if (result.occupancy >= 2) result.variance = empirical_variance(scratch);
  return result;
}

TubeVarianceResult tube_variance(const Dataset& data, int i, int j, double r) {
  std::vector<double> scratch;
  return tube_variance(data, i, j, r, scratch);
}

std::vector<int> tube_members(const Dataset& data, int i, int j, double r) {
  std::vector<int> members;
  scan_tube(data, i, j, r, [&](int k) { members.push_back(k); });
  return members;
}

double segment_variance_oracle(const std::function<double(const Vector&)>& f,
                               const Segment& seg, int m) {
  if (m < 2) {
    throw InsufficientDataError("segment_variance_oracle: need m >= 2");
  }
  double sum = 0.0;
  std::vector<double> values(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    const Vector p = (1.0 - t) * seg.a + t * seg.b;
    values[static_cast<size_t>(i)] = f(p);
    sum += values[static_cast<size_t>(i)];
  }
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(m);  // population variance
}

}  // namespace gcreg
