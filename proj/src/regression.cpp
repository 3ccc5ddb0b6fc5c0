#include "gcreg/regression.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "gcreg/errors.hpp"

namespace gcreg {

namespace {

void validate_spec(const PartitionSpec& spec) {
  if (!(spec.half_width > 0.0)) throw std::invalid_argument("partition: B must be > 0");
  if (spec.cells_per_axis < 1) throw std::invalid_argument("partition: K must be >= 1");
  if (spec.dim < 1) throw std::invalid_argument("partition: d must be >= 1");
  if (spec.degree < 0) throw std::invalid_argument("partition: degree must be >= 0");
}

// Multi-indices with total degree <= degree, graded lexicographic.
std::vector<std::vector<int>> monomial_exponents(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<size_t>(dim), 0);
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      current[static_cast<size_t>(pos)] = remaining;
      out.push_back(current);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<size_t>(pos)] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  for (int total = 0; total <= degree; ++total) emit(emit, 0, total);
  return out;
}

Vector clamp_point(const PartitionSpec& spec, const Vector& z) {
  Vector c = z;
  for (int j = 0; j < spec.dim; ++j) {
    c(j) = std::clamp(c(j), -spec.half_width, spec.half_width);
  }
  return c;
}

long long cell_index(const PartitionSpec& spec, const Vector& clamped) {
  const double side = spec.side();
  long long flat = 0;
  long long stride = 1;
  for (int j = 0; j < spec.dim; ++j) {
    int c = static_cast<int>(std::floor((clamped(j) + spec.half_width) / side));
    c = std::clamp(c, 0, spec.cells_per_axis - 1);
    flat += stride * c;
    stride *= spec.cells_per_axis;
  }
  return flat;
}

Vector local_coords(const PartitionSpec& spec, long long flat,
                    const Vector& clamped) {
  const double side = spec.side();
  const double half = side / 2.0;
  Vector w(spec.dim);
  for (int j = 0; j < spec.dim; ++j) {
    const int c = static_cast<int>(flat % spec.cells_per_axis);
    flat /= spec.cells_per_axis;
    const double center = -spec.half_width + (c + 0.5) * side;
    w(j) = (clamped(j) - center) / half;
  }
  return w;
}

void monomial_row(const std::vector<std::vector<int>>& exps, const Vector& w,
                  double* row) {
  for (size_t t = 0; t < exps.size(); ++t) {
    double v = 1.0;
    for (size_t j = 0; j < exps[t].size(); ++j) {
      for (int e = 0; e < exps[t][j]; ++e) v *= w(static_cast<Eigen::Index>(j));
    }
    row[t] = v;
  }
}

}  // namespace

int monomial_count(int dim, int degree) {
  // C(dim + degree, dim)
  long long num = 1;
  for (int t = 1; t <= dim; ++t) {
    num = num * (degree + t) / t;
  }
  return static_cast<int>(num);
}

int degree_for_smoothness(double smoothness) {
  return static_cast<int>(std::floor(smoothness + 1.0)) - 1;
}

PiecewisePolyModel fit_piecewise_poly(const Matrix& z, const Vector& y,
                                      const PartitionSpec& spec,
                                      double truncation) {
  validate_spec(spec);
  if (!(truncation > 0.0)) throw std::invalid_argument("fit: M must be > 0");
  if (z.rows() < 1) throw std::invalid_argument("fit: need n >= 1");
  if (z.cols() != spec.dim) throw DimensionError("fit: Z dim != partition dim");
  if (y.size() != z.rows()) throw DimensionError("fit: |y| != rows(Z)");

  const auto exps = monomial_exponents(spec.dim, spec.degree);
  const int p = static_cast<int>(exps.size());

  std::map<long long, std::vector<int>> cells;
  std::vector<Vector> clamped(static_cast<size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    clamped[static_cast<size_t>(i)] = clamp_point(spec, z.row(i).transpose());
    cells[cell_index(spec, clamped[static_cast<size_t>(i)])].push_back(
        static_cast<int>(i));
  }

  PiecewisePolyModel model{spec, truncation, {}};
  std::vector<double> row(static_cast<size_t>(p));
  for (const auto& [flat, rows] : cells) {
    Matrix a(static_cast<Eigen::Index>(rows.size()), p);
    Vector b(static_cast<Eigen::Index>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      const Vector w =
          local_coords(spec, flat, clamped[static_cast<size_t>(rows[r])]);
      monomial_row(exps, w, row.data());
      for (int t = 0; t < p; ++t) a(static_cast<Eigen::Index>(r), t) = row[static_cast<size_t>(t)];
      b(static_cast<Eigen::Index>(r)) = y(rows[r]);
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    model.coeffs[flat] = svd.solve(b);
  }
  return model;
}

double predict_pp(const PiecewisePolyModel& model, const Vector& z) {
  const PartitionSpec& spec = model.spec;
  if (z.size() != spec.dim) throw DimensionError("predict: point dim mismatch");
  const Vector clamped = clamp_point(spec, z);
  const long long flat = cell_index(spec, clamped);
  const auto it = model.coeffs.find(flat);
  double value = 0.0;
  if (it != model.coeffs.end()) {
    const auto exps = monomial_exponents(spec.dim, spec.degree);
    std::vector<double> row(exps.size());
    monomial_row(exps, local_coords(spec, flat, clamped), row.data());
    for (size_t t = 0; t < exps.size(); ++t) {
      value += it->second(static_cast<Eigen::Index>(t)) * row[t];
    }
  }
  return std::clamp(value, -model.truncation, model.truncation);
}

int partition_cells_per_axis(int n, double smoothness, int dim) {
  if (n < 3) throw std::invalid_argument("partition schedule: need n >= 3");
  if (!(smoothness > 0.0) || dim < 1) {
    throw std::invalid_argument("partition schedule: bad smoothness or dim");
  }
  const double exponent = 1.0 / (2.0 * smoothness + dim);
  const double k = std::pow(static_cast<double>(n) / std::log(n), exponent);
  return std::max(1, static_cast<int>(std::ceil(k)));
}

double theoretical_partition_cells(int n, double smoothness, int dim,
                                   double sigma, double bound_m, double c8) {
  if (n < 3) throw std::invalid_argument("partition schedule: need n >= 3");
  const double denom =
      std::max(sigma * sigma + 2.0 * c8 / n, 2.0 * bound_m * bound_m + 4.0 * c8 / n) *
      std::log(n);
  if (!(denom > 0.0)) throw std::invalid_argument("partition schedule: bad constants");
  return std::pow(std::ceil(n / denom), 1.0 / (2.0 * smoothness + dim));
}

namespace {

double median_pairwise_distance(const Matrix& z) {
  const Eigen::Index m = z.rows();
  if (m < 2) return 1.0;
  const Eigen::Index count = std::min<Eigen::Index>(m, 500);
  std::vector<Eigen::Index> idx(static_cast<size_t>(count));
  for (Eigen::Index t = 0; t < count; ++t) idx[static_cast<size_t>(t)] = t * m / count;
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(count) * (count - 1) / 2);
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index b = a + 1; b < count; ++b) {
      dists.push_back((z.row(idx[static_cast<size_t>(a)]) -
                       z.row(idx[static_cast<size_t>(b)]))
                          .norm());
    }
  }
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace

KernelModel fit_kernel(const Matrix& z, const Vector& y,
                       std::optional<double> bandwidth, double ridge) {
  if (z.rows() < 1) throw std::invalid_argument("fit_kernel: need n >= 1");
  if (y.size() != z.rows()) throw DimensionError("fit_kernel: |y| != rows(Z)");
  if (ridge < 0.0) throw std::invalid_argument("fit_kernel: ridge < 0");
  const double h = bandwidth.value_or(median_pairwise_distance(z));
  if (!(h > 0.0)) throw std::invalid_argument("fit_kernel: bandwidth must be > 0");

  const Eigen::Index m = z.rows();
  Matrix k(m, m);
  const double inv = -0.5 / (h * h);
  for (Eigen::Index i = 0; i < m; ++i) {
    k(i, i) = 1.0 + ridge;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = std::exp(inv * (z.row(i) - z.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }

  Vector weights;
  if (ridge > 0.0) {
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() == Eigen::Success) {
      weights = llt.solve(y);
    } else {
      weights = k.ldlt().solve(y);
    }
  } else {
    Eigen::LDLT<Matrix> ldlt(k);
    const Vector diag = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success ||
        diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff())) {
      throw SingularSystemError("fit_kernel: singular kernel matrix with ridge=0");
    }
    weights = ldlt.solve(y);
  }
  return KernelModel{z, std::move(weights), h, ridge};
}

double predict_kernel(const KernelModel& model, const Vector& z) {
  if (z.size() != model.centers.cols()) {
    throw DimensionError("predict_kernel: point dim mismatch");
  }
  const double inv = -0.5 / (model.bandwidth * model.bandwidth);
  double out = 0.0;
  for (Eigen::Index j = 0; j < model.centers.rows(); ++j) {
    out += model.weights(j) *
           std::exp(inv * (model.centers.row(j) - z.transpose()).squaredNorm());
  }
  return out;
}

int ComposedModel::input_dim() const {
  if (std::holds_alternative<PiecewisePolyModel>(g_hat)) {
    return std::get<PiecewisePolyModel>(g_hat).spec.dim;
  }
  return static_cast<int>(std::get<KernelModel>(g_hat).centers.cols());
}

double predict_composed(const ComposedModel& model, const Vector& x) {
  const Vector z = model.basis.matrix().transpose() * x;
  if (std::holds_alternative<PiecewisePolyModel>(model.g_hat)) {
    return predict_pp(std::get<PiecewisePolyModel>(model.g_hat), z);
  }
  return predict_kernel(std::get<KernelModel>(model.g_hat), z);
}

nlohmann::json model_to_json(const PiecewisePolyModel& model) {
  nlohmann::json doc;
  doc["type"] = "piecewise_poly";
  doc["B"] = model.spec.half_width;
  doc["K"] = model.spec.cells_per_axis;
  doc["d"] = model.spec.dim;
  doc["degree"] = model.spec.degree;
  doc["M"] = model.truncation;
  nlohmann::json cells = nlohmann::json::object();
  for (const auto& [flat, c] : model.coeffs) {
    cells[std::to_string(flat)] =
        std::vector<double>(c.data(), c.data() + c.size());
  }
  doc["cells"] = std::move(cells);
  return doc;
}

nlohmann::json model_to_json(const KernelModel& model) {
  nlohmann::json doc;
  doc["type"] = "kernel";
  doc["bandwidth"] = model.bandwidth;
  doc["ridge"] = model.ridge;
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.centers.rows(); ++i) {
    centers.push_back(std::vector<double>(
        model.centers.row(i).begin(), model.centers.row(i).end()));
  }
  doc["centers"] = std::move(centers);
  doc["weights"] = std::vector<double>(
      model.weights.data(), model.weights.data() + model.weights.size());
  return doc;
}

nlohmann::json composed_to_json(const ComposedModel& model) {
  nlohmann::json doc;
  doc["D"] = model.basis.ambient_dim();
  doc["d"] = model.basis.dim();
  std::vector<double> flat;
  for (int i = 0; i < model.basis.ambient_dim(); ++i) {
    for (int j = 0; j < model.basis.dim(); ++j) {
      flat.push_back(model.basis.matrix()(i, j));
    }
  }
  doc["basis_row_major"] = std::move(flat);
  doc["model"] = std::visit([](const auto& g) { return model_to_json(g); },
                            model.g_hat);
  return doc;
}

PiecewisePolyModel piecewise_poly_from_json(const nlohmann::json& doc) {
  PartitionSpec spec{doc.at("B").get<double>(), doc.at("K").get<int>(),
                     doc.at("d").get<int>(), doc.at("degree").get<int>()};
  PiecewisePolyModel model{spec, doc.at("M").get<double>(), {}};
  for (const auto& [key, value] : doc.at("cells").items()) {
    const auto c = value.get<std::vector<double>>();
    model.coeffs[std::stoll(key)] =
        Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  }
  return model;
}

KernelModel kernel_from_json(const nlohmann::json& doc) {
  const auto rows = doc.at("centers").get<std::vector<std::vector<double>>>();
  const auto w = doc.at("weights").get<std::vector<double>>();
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = m > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix centers(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    centers.row(i) = Eigen::Map<const Vector>(rows[static_cast<size_t>(i)].data(), d);
  }
  return KernelModel{std::move(centers),
                     Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())),
                     doc.at("bandwidth").get<double>(),
                     doc.at("ridge").get<double>()};
}

ComposedModel composed_from_json(const nlohmann::json& doc) {
  const int D = doc.at("D").get<int>();
  const int d = doc.at("d").get<int>();
  const auto flat = doc.at("basis_row_major").get<std::vector<double>>();
  if (static_cast<int>(flat.size()) != D * d) {
    throw IoError("composed model: basis size mismatch");
  }
  Matrix b(D, d);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < d; ++j) b(i, j) = flat[static_cast<size_t>(i) * d + j];
  }
  const nlohmann::json& g = doc.at("model");
  ComposedModel model{Basis::from_orthonormal(std::move(b)),
                      g.at("type") == "kernel"
                          ? std::variant<PiecewisePolyModel, KernelModel>(
                                kernel_from_json(g))
                          : std::variant<PiecewisePolyModel, KernelModel>(
                                piecewise_poly_from_json(g))};
  if (model.basis.dim() != model.input_dim()) {
    throw DimensionError("composed model: basis dim != model input dim");
  }
  return model;
}

void write_composed_model(const ComposedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << composed_to_json(model).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

ComposedModel read_composed_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad model file " + path + ": " + e.what());
  }
  return composed_from_json(doc);
}

}  // namespace gcreg
