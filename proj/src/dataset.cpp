#include "gcreg/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "gcreg/errors.hpp"

namespace gcreg {

Dataset::Dataset(Matrix x, Vector y, std::optional<Truth> truth)
    : x_(std::move(x)), y_(std::move(y)), truth_(std::move(truth)) {
  if (x_.rows() < 2) throw DimensionError("Dataset: need n >= 2 samples");
  if (y_.size() != x_.rows()) {
    throw DimensionError("Dataset: response length does not match samples");
  }
  if (!x_.allFinite() || !y_.allFinite()) {
    throw Error("Dataset: non-finite entries");
  }
  if (truth_) {
    if (truth_->basis.ambient_dim() != x_.cols()) {
      throw DimensionError("Dataset: truth basis ambient dim mismatch");
    }
    if (truth_->basis.dim() != truth_->intrinsic_dim) {
      throw DimensionError("Dataset: truth basis dim != stated d");
    }
    if (truth_->noiseless.size() != x_.rows()) {
      throw DimensionError("Dataset: truth responses length mismatch");
    }
  }
  xt_ = x_.transpose();
  sq_ = x_.rowwise().squaredNorm();
}

Dataset Dataset::head(int k) const {
  std::optional<Truth> t;
  if (truth_) {
    t = Truth{truth_->basis, truth_->intrinsic_dim,
              truth_->noiseless.head(k), truth_->example_id, truth_->seed,
              truth_->noise_percent};
  }
  return Dataset(x_.topRows(k), y_.head(k), std::move(t));
}

Dataset Dataset::tail(int k) const {
  std::optional<Truth> t;
  if (truth_) {
    t = Truth{truth_->basis, truth_->intrinsic_dim,
              truth_->noiseless.tail(k), truth_->example_id, truth_->seed,
              truth_->noise_percent};
  }
  return Dataset(x_.bottomRows(k), y_.tail(k), std::move(t));
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const int n = data.size();
  const int D = data.dim();
  for (int j = 0; j < D; ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < D; ++j) out << format_g17(data.x()(i, j)) << ',';
    out << format_g17(data.y()(i)) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_truth_json(const Dataset& data, const std::string& path) {
  if (!data.truth()) throw TruthUnavailableError("dataset has no truth block");
  const Truth& t = *data.truth();
  nlohmann::json doc;
  doc["example"] = t.example_id;
  doc["seed"] = t.seed;
  doc["noise_percent"] = t.noise_percent;
  doc["D"] = t.basis.ambient_dim();
  doc["d"] = t.intrinsic_dim;
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(t.basis.ambient_dim()) * t.basis.dim());
  for (int i = 0; i < t.basis.ambient_dim(); ++i) {
    for (int j = 0; j < t.basis.dim(); ++j) flat.push_back(t.basis.matrix()(i, j));
  }
  doc["basis_row_major"] = flat;
  doc["noiseless"] = std::vector<double>(
      t.noiseless.data(), t.noiseless.data() + t.noiseless.size());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string truth_sidecar_path(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".truth.json";
  }
  return csv_path + ".truth.json";
}

namespace {

std::optional<Truth> read_truth(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad truth sidecar " + path + ": " + e.what());
  }
  try {
    const int D = doc.at("D").get<int>();
    const int d = doc.at("d").get<int>();
    const auto flat = doc.at("basis_row_major").get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != D * d) {
      throw IoError("truth sidecar basis size mismatch: " + path);
    }
    Matrix b(D, d);
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < d; ++j) b(i, j) = flat[static_cast<size_t>(i) * d + j];
    }
    const auto clean = doc.at("noiseless").get<std::vector<double>>();
    if (static_cast<int>(clean.size()) != n) {
      throw IoError("truth sidecar response count mismatch: " + path);
    }
    Truth t{Basis::from_orthonormal(std::move(b)), d,
            Eigen::Map<const Vector>(clean.data(), n),
            doc.value("example", std::string{}),
            doc.value("seed", std::uint64_t{0}),
            doc.value("noise_percent", 0.0)};
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad truth sidecar " + path + ": " + e.what());
  }
}

}  // namespace

Dataset read_dataset_csv(const std::string& path,
                         const std::string& truth_path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  int cols = 1;
  for (char c : line) {
    if (c == ',') ++cols;
  }
  if (cols < 2) throw IoError("expected `x1,...,xD,y` header: " + path);
  const int D = cols - 1;
  std::vector<double> values;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    int got = 0;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      values.push_back(std::strtod(field.c_str(), &end));
      if (end == field.c_str()) throw IoError("bad number in " + path);
      ++got;
    }
    if (got != cols) throw IoError("ragged row in " + path);
    ++rows;
  }
  Matrix x(rows, D);
  Vector y(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < D; ++j) x(i, j) = values[static_cast<size_t>(i) * cols + j];
    y(i) = values[static_cast<size_t>(i) * cols + D];
  }
  std::optional<Truth> truth;
  if (!truth_path.empty()) truth = read_truth(truth_path, rows);
  return Dataset(std::move(x), std::move(y), std::move(truth));
}

}  // namespace gcreg
