#pragma once

#include <optional>
#include <string>

#include "gcreg/geometry.hpp"

namespace gcreg {

/// Planted ground truth carried by synthetic datasets: the active subspace,
/// its dimension, and the noiseless responses.
struct Truth {
  Basis basis;
  int intrinsic_dim;
  Vector noiseless;
  std::string example_id;       // empty when not from a generator
  std::uint64_t seed = 0;
  double noise_percent = 0.0;
};

/// Immutable labeled sample: n points in R^D with responses. Construction
/// validates n >= 2, finiteness, and (when present) the truth block.
/// Caches a point-contiguous transpose and squared norms for tube scans.
class Dataset {
 public:
  Dataset(Matrix x, Vector y, std::optional<Truth> truth = std::nullopt);

  int size() const { return static_cast<int>(x_.rows()); }
  int dim() const { return static_cast<int>(x_.cols()); }
  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  const std::optional<Truth>& truth() const { return truth_; }

  /// D x n layout: column k is point k (contiguous in memory).
  const Matrix& points_by_column() const { return xt_; }
  /// ||x_k||^2 per point.
  const Vector& squared_norms() const { return sq_; }

  /// First k rows / last k rows as new datasets (truth sliced alongside).
  Dataset head(int k) const;
  Dataset tail(int k) const;

 private:
  Matrix x_;   // n x D
  Vector y_;   // n
  Matrix xt_;  // D x n
  Vector sq_;  // n
  std::optional<Truth> truth_;
};

/// Writes `x1,...,xD,y` CSV with 17-significant-digit decimals.
void write_dataset_csv(const Dataset& data, const std::string& path);

/// Writes the truth sidecar (basis row-major, d, example id, seed,
/// noiseless responses). Throws TruthUnavailableError without truth.
void write_truth_json(const Dataset& data, const std::string& path);

/// Reads a dataset CSV; if truth_path is non-empty and exists, attaches it.
Dataset read_dataset_csv(const std::string& path,
                         const std::string& truth_path = "");

/// Sidecar path convention: `foo.csv` -> `foo.truth.json`.
std::string truth_sidecar_path(const std::string& csv_path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double v);

}  // namespace gcreg
