#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "gcreg/geometry.hpp"

namespace gcreg {

/// Cubical partition of [-B, B]^d into K^d cells carrying polynomials of
/// total degree <= `degree`.
struct PartitionSpec {
  double half_width = 1.0;  // B > 0
  int cells_per_axis = 1;   // K >= 1
  int dim = 1;              // d >= 1
  int degree = 1;           // k >= 0

  double side() const { return 2.0 * half_width / cells_per_axis; }
};

/// Number of monomials of total degree <= degree in dim variables:
/// C(dim + degree, dim).
int monomial_count(int dim, int degree);

/// Least-squares piecewise polynomial with truncation to [-M, M].
/// Coefficients are stored per cell in cell-local coordinates (centered at
/// the cell center, scaled by the half side length). Empty cells carry the
/// zero polynomial and are not stored.
struct PiecewisePolyModel {
  PartitionSpec spec;
  double truncation = 1.0;               // M > 0
  std::map<long long, Vector> coeffs;    // flat cell index -> coefficients
};

/// Gaussian-kernel ridge interpolant.
struct KernelModel {
  Matrix centers;    // m x d
  Vector weights;    // m
  double bandwidth = 1.0;  // > 0
  double ridge = 0.0;      // >= 0
};

/// Stage-two regressor composed with a subspace estimate:
/// f^(x) = g^(basis^T x).
struct ComposedModel {
  Basis basis;
  std::variant<PiecewisePolyModel, KernelModel> g_hat;

  int input_dim() const;
};

/// Per-cell least squares of y against the local monomial basis. Rows of Z
/// are clamped into [-B, B]^d before cell assignment; rank-deficient cells
/// get the minimum-norm solution (singular values below 1e-10 of the
/// largest treated as zero).
PiecewisePolyModel fit_piecewise_poly(const Matrix& z, const Vector& y,
                                      const PartitionSpec& spec,
                                      double truncation);

/// Evaluates the cell polynomial at the (clamped) point, clipped to [-M, M].
double predict_pp(const PiecewisePolyModel& model, const Vector& z);

/// Practical partition schedule: K = ceil((n / log n)^(1 / (2s + d))).
int partition_cells_per_axis(int n, double smoothness, int dim);

/// Verbatim evaluation of the theoretical partition-size expression
/// ceil(n / (max(sigma^2 + 2 C8/n, 2 M^2 + 4 C8/n) log n))^(1/(2s+d)).
/// Formula utility only; its constants are not estimable from data.
double theoretical_partition_cells(int n, double smoothness, int dim,
                                   double sigma, double bound_m, double c8);

/// Polynomial degree from Hoelder smoothness: k = floor(s + 1) - 1.
int degree_for_smoothness(double smoothness);

/// Gaussian-kernel ridge fit with all rows of Z as centers. Default
/// bandwidth is the median pairwise distance over a deterministic
/// <=500-point subsample. Throws SingularSystemError only when ridge == 0
/// and the kernel matrix is singular.
KernelModel fit_kernel(const Matrix& z, const Vector& y,
                       std::optional<double> bandwidth = std::nullopt,
                       double ridge = 1e-3);

double predict_kernel(const KernelModel& model, const Vector& z);

/// g^ applied to basis^T x.
double predict_composed(const ComposedModel& model, const Vector& x);

/// JSON (de)serialization; doubles round-trip value-exactly.
nlohmann::json model_to_json(const PiecewisePolyModel& model);
nlohmann::json model_to_json(const KernelModel& model);
nlohmann::json composed_to_json(const ComposedModel& model);
PiecewisePolyModel piecewise_poly_from_json(const nlohmann::json& doc);
KernelModel kernel_from_json(const nlohmann::json& doc);
ComposedModel composed_from_json(const nlohmann::json& doc);
void write_composed_model(const ComposedModel& model, const std::string& path);
ComposedModel read_composed_model(const std::string& path);

}  // namespace gcreg
