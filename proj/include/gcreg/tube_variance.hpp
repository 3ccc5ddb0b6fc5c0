#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gcreg/dataset.hpp"

namespace gcreg {

/// Variance of responses inside one tube. `variance` is empty (INSUFFICIENT)
/// exactly when fewer than 2 samples fall inside.
struct TubeVarianceResult {
  std::optional<double> variance;
  int occupancy = 0;
  bool insufficient() const { return !variance.has_value(); }
};

/// Unbiased sample variance (denominator m-1). Throws InsufficientDataError
/// for fewer than 2 values.
double empirical_variance(std::span<const double> values);

/// Empirical tube variance V^_y(x_i, x_j, r): collects every sample k whose
/// point lies in the tube of radius r around segment (x_i, x_j) — the
/// endpoints always qualify — and returns the sample variance of their
/// responses. The membership scan always runs over the full dataset.
TubeVarianceResult tube_variance(const Dataset& data, int i, int j, double r);

/// Same, reusing a caller-owned scratch buffer for the member responses.
TubeVarianceResult tube_variance(const Dataset& data, int i, int j, double r,
                                 std::vector<double>& scratch);

/// Indices of all samples inside the tube (ascending).
std::vector<int> tube_members(const Dataset& data, int i, int j, double r);

/// Brute-force variance of f along a segment: population variance
/// (denominator m) of f at m equispaced points including both endpoints.
/// Test oracle for the segment variance the tube variance approximates.
double segment_variance_oracle(const std::function<double(const Vector&)>& f,
                               const Segment& seg, int m);

}  // namespace gcreg
