#include "gcreg/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcreg/errors.hpp"
#include "gcreg/rng.hpp"
#include "gcreg/tube_variance.hpp"

namespace gcreg {

GcrFitReport gcr_connect(const Dataset& data, const GcrParams& params) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("gcr: alpha must be > 0");
  if (!(params.radius > 0.0)) throw std::invalid_argument("gcr: radius must be > 0");
  const int n = data.size();
  const int D = data.dim();

  std::vector<int> pool(static_cast<size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  if (params.scan_order == ScanOrder::kShuffled) {
    Rng rng(derive_seed(params.shuffle_seed, 0x5c4aULL));
    for (int k = n - 1; k > 0; --k) {
      const auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(k) + 1));
      std::swap(pool[static_cast<size_t>(k)], pool[static_cast<size_t>(r)]);
    }
  }

  GcrFitReport report;
  report.g_hat = Matrix::Zero(D, D);
  std::vector<double> scratch;

  while (pool.size() > 1) {
    const int leader = pool.front();
    int connected_at = -1;  // position in pool
    int evals = 0;
    for (size_t pos = 1; pos < pool.size(); ++pos) {
      if (params.candidate_cap && evals >= *params.candidate_cap) break;
      ++evals;
      const int cand = pool[pos];
      const TubeVarianceResult tv =
          tube_variance(data, leader, cand, params.radius, scratch);
      if (!tv.insufficient() && *tv.variance <= params.alpha) {
        const Vector diff = data.x().row(leader) - data.x().row(cand);
        report.g_hat.noalias() += diff * diff.transpose();
        report.pairs.emplace_back(leader, cand);
        ++report.n_alpha;
        connected_at = static_cast<int>(pos);
        break;
      }
    }
    if (connected_at >= 0) {
      pool.erase(pool.begin() + connected_at);
    }
    pool.erase(pool.begin());  // the leader leaves either way
  }

  if (report.n_alpha == 0) {
    throw NoPairsError("gcr: no pair met the variance threshold; raise alpha");
  }
  report.g_hat /= static_cast<double>(report.n_alpha);
  return report;
}

GcrFitReport gcr_fit(const Dataset& data, const GcrParams& params, int d) {
  GcrFitReport report = gcr_connect(data, params);
  Eigen::SelfAdjointEigenSolver<Matrix> es(report.g_hat);
  if (es.info() != Eigen::Success) throw Error("gcr: eigensolver failed");
  report.eigenvalues = es.eigenvalues();
  if (d < 1 || d > data.dim()) throw DimensionError("gcr: need 1 <= d <= D");
  report.basis = Basis::from_orthonormal(es.eigenvectors().leftCols(d));
  return report;
}

std::vector<std::pair<int, int>> scr_pairs(const Dataset& data, double alpha) {
  const int n = data.size();
  // Enumerate via the sorted responses: qualifying mates form a contiguous
  // window. Pairs are reported as (min index, max index).
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Vector& y = data.y();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return y(a) != y(b) ? y(a) < y(b) : a < b;
  });
  std::vector<std::pair<int, int>> pairs;
  size_t hi = 0;
  for (size_t lo = 0; lo < order.size(); ++lo) {
    if (hi < lo + 1) hi = lo + 1;
    while (hi < order.size() && y(order[hi]) - y(order[lo]) <= alpha) ++hi;
    for (size_t k = lo + 1; k < hi; ++k) {
      pairs.emplace_back(std::min(order[lo], order[k]),
                         std::max(order[lo], order[k]));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

Basis scr_fit(const Dataset& data, double alpha, int d) {
  const auto pairs = scr_pairs(data, alpha);
  if (pairs.empty()) {
    throw NoPairsError("scr: no pair within alpha; raise alpha");
  }
  const int D = data.dim();
  Matrix k_hat = Matrix::Zero(D, D);
  for (const auto& [i, j] : pairs) {
    const Vector diff = data.x().row(i) - data.x().row(j);
    k_hat.noalias() += diff * diff.transpose();
  }
  k_hat /= static_cast<double>(pairs.size());
  return smallest_eigvecs(k_hat, d).first;
}

Basis sir_fit(const Dataset& data, int d, int slice_target) {
  const int n = data.size();
  const int D = data.dim();
  if (d < 1 || d > D) throw DimensionError("sir: need 1 <= d <= D");
  if (slice_target < 1) throw std::invalid_argument("sir: slice_target < 1");
  const Vector& y = data.y();
  if (y.maxCoeff() == y.minCoeff()) {
    throw DegenerateError("sir: constant response");
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return y(a) != y(b) ? y(a) < y(b) : a < b;
  });

  const int slices = std::max(
      2, static_cast<int>(std::lround(static_cast<double>(n) / slice_target)));
  const int base = n / slices;
  const int rem = n % slices;

  const Vector x_bar = data.x().colwise().mean();
  Matrix m = Matrix::Zero(D, D);
  int start = 0;
  for (int h = 0; h < slices; ++h) {
    const int count = base + (h < rem ? 1 : 0);
    if (count == 0) continue;
    Vector mean = Vector::Zero(D);
    for (int k = start; k < start + count; ++k) {
      mean += data.x().row(order[static_cast<size_t>(k)]).transpose();
    }
    mean = mean / count - x_bar;
    m.noalias() += (static_cast<double>(count) / n) * (mean * mean.transpose());
    start += count;
  }
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    throw DegenerateError("sir: slice-mean covariance is zero");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw Error("sir: eigensolver failed");
  return Basis::from_orthonormal(es.eigenvectors().rightCols(d));
}

}  // namespace gcreg
