#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gcreg/dataset.hpp"

namespace gcreg {

enum class ScanOrder { kOriginal, kShuffled };

/// Parameters of the pairing stage of GCR.
struct GcrParams {
  double alpha = 0.0;       // connection threshold, > 0
  double radius = 0.0;      // tube radius, > 0
  ScanOrder scan_order = ScanOrder::kOriginal;
  std::uint64_t shuffle_seed = 0;
  /// Max tube-variance evaluations per leading point; capped leaders are
  /// removed unconnected. Unset = scan all remaining candidates.
  std::optional<int> candidate_cap;
};

/// Output of the GCR pairing stage (and, after fitting, the subspace).
/// Pairs are disjoint by construction and n_alpha <= floor(n/2).
struct GcrFitReport {
  Matrix g_hat;                            // D x D, PSD
  int n_alpha = 0;                         // number of connected pairs
  std::vector<std::pair<int, int>> pairs;  // dataset indices (leader, mate)
  std::optional<Basis> basis;              // set by gcr_fit
  Vector eigenvalues;                      // full ascending spectrum (fit)
};

/// Greedy disjoint pairing: repeatedly take the first remaining point as
/// leader, scan the remaining points in order, and connect it to the first
/// candidate whose tube variance is at most alpha (an undefined variance
/// never connects). Both points of a connected pair leave the pool; an
/// unconnected leader leaves alone. G^ is the mean outer product of the
/// pair differences. Throws NoPairsError when nothing connects.
GcrFitReport gcr_connect(const Dataset& data, const GcrParams& params);

/// gcr_connect + eigendecomposition: the basis spans the eigenvectors of
/// the d smallest eigenvalues of G^.
GcrFitReport gcr_fit(const Dataset& data, const GcrParams& params, int d);

/// All unordered pairs with |y_i - y_j| <= alpha (simple contour regression).
std::vector<std::pair<int, int>> scr_pairs(const Dataset& data, double alpha);

/// SCR subspace estimate: smallest-d eigenspace of the mean outer product
/// over all qualifying pairs. Throws NoPairsError when no pair qualifies.
Basis scr_fit(const Dataset& data, double alpha, int d);

/// Sliced inverse regression: sort by response, slice into
/// max(2, round(n/slice_target)) equal-count slices (remainder spread one
/// per slice from the first), and take the top-d eigenspace of the
/// weighted covariance of slice means of centered x.
/// Throws DegenerateError on constant response.
Basis sir_fit(const Dataset& data, int d, int slice_target = 200);

}  // namespace gcreg
