#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gcreg/dataset.hpp"

namespace gcreg {

enum class SamplerKind { kUniformCube, kNonellipticalQuadrant };

/// One of the six benchmark problems: planted subspace, link function,
/// matching ambient formula, and sampling domain.
struct ExampleSpec {
  std::string id;  // "1", "2a", "2b", "3", "4", "5", "6"
  int ambient_dim;
  int intrinsic_dim;
  Basis basis;
  std::function<double(const Vector&)> link;     // g on R^d
  std::function<double(const Vector&)> ambient;  // f on R^D
  SamplerKind sampler;
  double lo, hi;  // cube bounds (kUniformCube)
};

/// Registry lookup. Throws std::invalid_argument for unknown ids, naming
/// the valid ones.
const ExampleSpec& example_spec(const std::string& id);

const std::vector<std::string>& example_ids();

/// Relative noise level: sigma = (percent/100) * sqrt(mean of f^2),
/// computed on the realized responses.
struct NoiseSpec {
  double percent = 0.0;  // >= 0
  std::uint64_t seed = 0;
};

double noise_sigma(const Vector& f_values, double percent);

/// Samples the example, evaluates f, and adds N(0, sigma^2) noise with
/// sigma from the percent convention on this realization. The planted
/// basis, intrinsic dimension, and noiseless responses land in truth.
/// Identical arguments reproduce the dataset bit-for-bit.
Dataset make_example(const std::string& id, int n, const NoiseSpec& noise,
                     std::uint64_t seed);

/// Uniform on [-0.5, 0.5]^2 minus the quadrant {x1 > 0, x2 < 0}, by
/// rejection. Returns an n x 2 matrix (n may be 0).
Matrix sample_nonelliptical(int n, std::uint64_t seed);

}  // namespace gcreg
