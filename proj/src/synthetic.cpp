#include "gcreg/synthetic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "gcreg/errors.hpp"
#include "gcreg/rng.hpp"

namespace gcreg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSampleStream = 0x73616d70ULL;  // "samp"
constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;   // "nois"

Matrix unit_columns(int D, const std::vector<std::vector<std::pair<int, double>>>& cols) {
  Matrix m = Matrix::Zero(D, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    for (const auto& [i, v] : cols[j]) m(i, static_cast<Eigen::Index>(j)) = v;
  }
  return m;
}

std::map<std::string, ExampleSpec> build_registry() {
  std::map<std::string, ExampleSpec> reg;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // 1: f(x) = x1^2 on the three-quarter square, single index e1.
  reg.emplace("1", ExampleSpec{
      "1", 2, 1,
      Basis::from_orthonormal(unit_columns(2, {{{0, 1.0}}})),
      [](const Vector& z) { return z(0) * z(0); },
      [](const Vector& x) { return x(0) * x(0); },
      SamplerKind::kNonellipticalQuadrant, -0.5, 0.5});

  // 2a: f(x) = ((x1+x2)/2)^3, direction (e1+e2)/sqrt(2).
  reg.emplace("2a", ExampleSpec{
      "2a", 10, 1,
      Basis::from_orthonormal(
          unit_columns(10, {{{0, inv_sqrt2}, {1, inv_sqrt2}}})),
      [inv_sqrt2](const Vector& z) { return std::pow(z(0) * inv_sqrt2, 3); },
      [](const Vector& x) { return std::pow((x(0) + x(1)) / 2.0, 3); },
      SamplerKind::kUniformCube, -1.0, 1.0});

  // 2b: f(x) = exp((x1+x2)/2), same direction.
  reg.emplace("2b", ExampleSpec{
      "2b", 10, 1,
      Basis::from_orthonormal(
          unit_columns(10, {{{0, inv_sqrt2}, {1, inv_sqrt2}}})),
      [inv_sqrt2](const Vector& z) { return std::exp(z(0) * inv_sqrt2); },
      [](const Vector& x) { return std::exp((x(0) + x(1)) / 2.0); },
      SamplerKind::kUniformCube, -1.0, 1.0});

  // 3: f(x) = sin(-pi/2 + pi/6 sum_{i<=9} x_i) + x10,
  //    v1 = (1/3) sum_{i<=9} e_i, v2 = e10.
  {
    std::vector<std::pair<int, double>> v1;
    for (int i = 0; i < 9; ++i) v1.emplace_back(i, 1.0 / 3.0);
    reg.emplace("3", ExampleSpec{
        "3", 10, 2,
        Basis::from_orthonormal(unit_columns(10, {v1, {{9, 1.0}}})),
        [](const Vector& z) {
          return std::sin(-kPi / 2.0 + kPi / 2.0 * z(0)) + z(1);
        },
        [](const Vector& x) {
          double s = 0.0;
          for (int i = 0; i < 9; ++i) s += x(i);
          return std::sin(-kPi / 2.0 + kPi / 6.0 * s) + x(9);
        },
        SamplerKind::kUniformCube, -1.0, 1.0});
  }

  // 4: f(x) = x1^2 + (x2+x3)^2, v1 = e1, v2 = (e2+e3)/sqrt(2);
  //    g(z1,z2) = z1^2 + 2 z2^2.
  reg.emplace("4", ExampleSpec{
      "4", 10, 2,
      Basis::from_orthonormal(
          unit_columns(10, {{{0, 1.0}}, {{1, inv_sqrt2}, {2, inv_sqrt2}}})),
      [](const Vector& z) { return z(0) * z(0) + 2.0 * z(1) * z(1); },
      [](const Vector& x) {
        const double s = x(1) + x(2);
        return x(0) * x(0) + s * s;
      },
      SamplerKind::kUniformCube, -1.0, 1.0});

  // 5: f(x) = 10 sin(pi/5 (x1 + 2 (x2+x3)^2)). With v2 = (e2+e3)/sqrt(2)
  //    the matching link is g(z1,z2) = 10 sin(pi/5 (z1 + 4 z2^2)).
  reg.emplace("5", ExampleSpec{
      "5", 10, 2,
      Basis::from_orthonormal(
          unit_columns(10, {{{0, 1.0}}, {{1, inv_sqrt2}, {2, inv_sqrt2}}})),
      [](const Vector& z) {
        return 10.0 * std::sin(kPi / 5.0 * (z(0) + 4.0 * z(1) * z(1)));
      },
      [](const Vector& x) {
        const double s = x(1) + x(2);
        return 10.0 * std::sin(kPi / 5.0 * (x(0) + 2.0 * s * s));
      },
      SamplerKind::kUniformCube, -1.0, 1.0});

  // 6: f(x) = 2 x1^2 (x2+x3)^2, g(z1,z2) = 4 z1^2 z2^2.
  reg.emplace("6", ExampleSpec{
      "6", 10, 2,
      Basis::from_orthonormal(
          unit_columns(10, {{{0, 1.0}}, {{1, inv_sqrt2}, {2, inv_sqrt2}}})),
      [](const Vector& z) { return 4.0 * z(0) * z(0) * z(1) * z(1); },
      [](const Vector& x) {
        const double s = x(1) + x(2);
        return 2.0 * x(0) * x(0) * s * s;
      },
      SamplerKind::kUniformCube, -1.0, 1.0});

  return reg;
}

const std::map<std::string, ExampleSpec>& registry() {
  static const std::map<std::string, ExampleSpec> reg = build_registry();
  return reg;
}

}  // namespace

const ExampleSpec& example_spec(const std::string& id) {
  const auto& reg = registry();
  const auto it = reg.find(id);
  if (it == reg.end()) {
    std::string valid;
    for (const auto& [key, unused] : reg) {
      if (!valid.empty()) valid += ", ";
      valid += key;
    }
    throw std::invalid_argument("unknown example id '" + id +
                                "' (valid: " + valid + ")");
  }
  return it->second;
}

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [key, unused] : registry()) out.push_back(key);
    return out;
  }();
  return ids;
}

double noise_sigma(const Vector& f_values, double percent) {
  if (f_values.size() < 1) {
    throw std::invalid_argument("noise_sigma: need n >= 1");
  }
  if (percent < 0.0) throw std::invalid_argument("noise_sigma: percent < 0");
  return percent / 100.0 * std::sqrt(f_values.squaredNorm() / f_values.size());
}

Matrix sample_nonelliptical(int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_nonelliptical: n < 0");
  Rng rng(derive_seed(seed, kSampleStream));
  Matrix x(n, 2);
  for (int i = 0; i < n; ++i) {
    for (;;) {
      const double u = rng.uniform(-0.5, 0.5);
      const double v = rng.uniform(-0.5, 0.5);
      if (u > 0.0 && v < 0.0) continue;  // excluded quadrant
      x(i, 0) = u;
      x(i, 1) = v;
      break;
    }
  }
  return x;
}

Dataset make_example(const std::string& id, int n, const NoiseSpec& noise,
                     std::uint64_t seed) {
  const ExampleSpec& spec = example_spec(id);
  if (n < 2) throw std::invalid_argument("make_example: need n >= 2");

  Matrix x;
  if (spec.sampler == SamplerKind::kNonellipticalQuadrant) {
    x = sample_nonelliptical(n, seed);
  } else {
    Rng rng(derive_seed(seed, kSampleStream));
    x.resize(n, spec.ambient_dim);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < spec.ambient_dim; ++j) {
        x(i, j) = rng.uniform(spec.lo, spec.hi);
      }
    }
  }

  Vector clean(n);
  for (int i = 0; i < n; ++i) clean(i) = spec.ambient(x.row(i).transpose());

  Vector y = clean;
  const double sigma = noise_sigma(clean, noise.percent);
  if (sigma > 0.0) {
    Rng rng(derive_seed(seed, kNoiseStream, noise.seed));
    for (int i = 0; i < n; ++i) y(i) += sigma * rng.normal();
  }

  Truth truth{spec.basis, spec.intrinsic_dim, clean, spec.id, seed,
              noise.percent};
  return Dataset(std::move(x), std::move(y), std::move(truth));
}

}  // namespace gcreg
