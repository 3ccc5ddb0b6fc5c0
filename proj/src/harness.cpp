#include "gcreg/harness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gcreg/errors.hpp"
#include "gcreg/rng.hpp"

namespace gcreg {

std::string method_name(Method m) {
  switch (m) {
    case Method::kGcr: return "GCR";
    case Method::kScr: return "SCR";
    case Method::kSir: return "SIR";
    case Method::kAmbient: return "AMBIENT";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "GCR") return Method::kGcr;
  if (name == "SCR") return Method::kScr;
  if (name == "SIR") return Method::kSir;
  if (name == "AMBIENT") return Method::kAmbient;
  throw ConfigError("method: expected GCR, SCR, SIR or AMBIENT, got '" +
                    name + "'");
}

double AlphaRule::evaluate(int n, int ambient_dim) const {
  switch (kind) {
    case Kind::kScaled: return c * std::pow(n, -1.0 / ambient_dim);
    case Kind::kAbsolute: return c;
    case Kind::kInverse: return c / n;
  }
  return c;
}

double RadiusRule::evaluate(int n, int ambient_dim) const {
  if (kind == Kind::kAbsolute) return c;
  return c * std::pow(n, -1.0 / ambient_dim);
}

AlphaRule default_alpha_rule(const std::string& example_id, Method method,
                             double noise_percent) {
  using K = AlphaRule::Kind;
  if (method == Method::kGcr) {
    if (example_id == "1") return {K::kAbsolute, 0.001};
    if (example_id == "2a") return {K::kScaled, 1.0 / 200.0};
    if (example_id == "2b") return {K::kScaled, 1.0 / 400.0};
    if (example_id == "3") {
      if (noise_percent == 0.0) return {K::kScaled, 1.0 / 120.0};
      if (noise_percent < 50.0) return {K::kScaled, 1.0 / 50.0};
      return {K::kScaled, 1.0};
    }
    // 4, 5, 6: quadratic-style links share the heavy-noise scaling.
    if (noise_percent == 0.0 && example_id == "4") return {K::kScaled, 1.0 / 5.0};
    if (noise_percent < 50.0) return {K::kScaled, 1.0 / 50.0};
    return {K::kScaled, 1.0};
  }
  if (method == Method::kScr) {
    if (example_id == "1") return {K::kAbsolute, 0.01};
    if (example_id == "2a" || example_id == "2b") return {K::kInverse, 2.0};
    if (example_id == "3" && noise_percent == 0.0) return {K::kInverse, 2.0};
    if (noise_percent < 50.0) return {K::kInverse, 1.0};
    return {K::kInverse, 24.0};
  }
  return {K::kAbsolute, 0.0};  // unused by SIR / AMBIENT
}

RadiusRule default_r_rule(const std::string& example_id) {
  if (example_id == "1") return {RadiusRule::Kind::kAbsolute, 0.01};
  return {RadiusRule::Kind::kScaled, 2.0};
}

ExperimentConfig resolve_defaults(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  const ExampleSpec& ex = example_spec(out.example_id);  // validates id
  if (out.d < 1 || out.d > ex.ambient_dim) {
    throw ConfigError("d: need 1 <= d <= " + std::to_string(ex.ambient_dim));
  }
  if (out.trials < 1) throw ConfigError("trials: must be >= 1");
  if (out.n_grid.empty()) throw ConfigError("n_grid: must be non-empty");
  for (size_t i = 0; i < out.n_grid.size(); ++i) {
    if (out.n_grid[i] < 3) throw ConfigError("n_grid: sizes must be >= 3");
    if (i > 0 && out.n_grid[i] <= out.n_grid[i - 1]) {
      throw ConfigError("n_grid: must be strictly increasing");
    }
  }
  if (out.noise_percent < 0.0) throw ConfigError("noise_percent: must be >= 0");
  if (!(out.smoothness > 0.0)) throw ConfigError("smoothness: must be > 0");
  if (out.slice_target && *out.slice_target < 1) {
    throw ConfigError("slice_target: must be >= 1");
  }
  if (!out.alpha_rule) {
    out.alpha_rule =
        default_alpha_rule(out.example_id, out.method, out.noise_percent);
  }
  if (!out.r_rule) out.r_rule = default_r_rule(out.example_id);
  if (!out.slice_target) out.slice_target = 200;
  return out;
}

FitOutcome fit_pipeline(const Dataset& train, Method method, int d,
                        std::optional<double> alpha,
                        std::optional<double> radius, int slice_target,
                        RegressorKind regressor, double smoothness) {
  const int D = train.dim();
  std::optional<Basis> basis;
  std::optional<int> n_alpha;
  std::vector<std::pair<int, int>> pairs;

  switch (method) {
    case Method::kGcr: {
      if (!alpha || !radius) {
        throw ConfigError("GCR needs alpha and radius");
      }
      GcrParams params;
      params.alpha = *alpha;
      params.radius = *radius;
      GcrFitReport report = gcr_fit(train, params, d);
      basis = report.basis;
      n_alpha = report.n_alpha;
      pairs = std::move(report.pairs);
      break;
    }
    case Method::kScr: {
      if (!alpha) throw ConfigError("SCR needs alpha");
      pairs = scr_pairs(train, *alpha);
      if (pairs.empty()) throw NoPairsError("scr: no pair within alpha; raise alpha");
      basis = scr_fit(train, *alpha, d);
      break;
    }
    case Method::kSir:
      basis = sir_fit(train, d, slice_target);
      break;
    case Method::kAmbient:
      break;
  }

  const Basis projection = basis ? *basis : Basis::identity(D, D);
  const Matrix z = train.x() * projection.matrix();

  ComposedModel model{projection, PiecewisePolyModel{}};
  if (regressor == RegressorKind::kPiecewisePoly) {
    double half_width = z.cwiseAbs().maxCoeff();
    if (!(half_width > 0.0)) half_width = 1.0;
    double truncation = train.y().cwiseAbs().maxCoeff();
    if (!(truncation > 0.0)) truncation = 1.0;
    const PartitionSpec spec{
        half_width, partition_cells_per_axis(train.size(), smoothness, projection.dim()),
        projection.dim(), degree_for_smoothness(smoothness)};
    model.g_hat = fit_piecewise_poly(z, train.y(), spec, truncation);
  } else {
    model.g_hat = fit_kernel(z, train.y());
  }

  FitOutcome outcome{std::move(model), std::nullopt, n_alpha, std::move(pairs)};
  if (train.truth() && basis) {
    outcome.subspace_error = projection_distance(*basis, train.truth()->basis);
  }
  return outcome;
}

TrialResult run_trial(const ExperimentConfig& raw, int n,
                      std::uint64_t trial_seed) {
  const ExperimentConfig config = resolve_defaults(raw);
  const ExampleSpec& example = example_spec(config.example_id);
  const Dataset data = make_example(config.example_id, n,
                                    NoiseSpec{config.noise_percent, trial_seed},
                                    trial_seed);
  const int n_test = (n + 9) / 10;  // ceil(n/10)
  const int n_train = n - n_test;
  const Dataset train = data.head(n_train);
  const Matrix test_x = data.x().bottomRows(n_test);
  const Vector test_y = data.y().tail(n_test);

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<double> alpha, radius;
  if (config.method == Method::kGcr || config.method == Method::kScr) {
    alpha = config.alpha_rule->evaluate(n_train, example.ambient_dim);
  }
  if (config.method == Method::kGcr) {
    radius = config.r_rule->evaluate(n_train, example.ambient_dim);
  }
  const FitOutcome fit =
      fit_pipeline(train, config.method, config.d, alpha, radius,
                   *config.slice_target, config.regressor, config.smoothness);

  double sse = 0.0;
  for (int i = 0; i < n_test; ++i) {
    const double pred = predict_composed(fit.model, test_x.row(i).transpose());
    const double diff = pred - test_y(i);
    sse += diff * diff;
  }
  const auto t1 = std::chrono::steady_clock::now();

  TrialResult result;
  result.n = n;
  result.subspace_error = fit.subspace_error.value_or(1.0);
  result.regression_error = std::sqrt(sse / n_test);
  result.n_alpha = fit.n_alpha;
  result.wall_time_seconds =
      std::chrono::duration<double>(t1 - t0).count();
  return result;
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("fit_line: need >= 2 points");
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

namespace {

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& raw, int jobs) {
  const ExperimentConfig config = resolve_defaults(raw);
  const size_t grid = config.n_grid.size();
  const size_t total = grid * static_cast<size_t>(config.trials);

  struct Slot {
    std::optional<TrialResult> result;
    std::optional<TrialFailure> failure;
  };
  std::vector<Slot> slots(total);
  std::atomic<size_t> next{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const size_t task = next.fetch_add(1);
      if (task >= total || aborted.load()) return;
      const size_t ni = task / static_cast<size_t>(config.trials);
      const int trial = static_cast<int>(task % static_cast<size_t>(config.trials));
      const int n = config.n_grid[ni];
      const std::uint64_t seed =
          derive_seed(config.master_seed, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(trial));
      try {
        TrialResult r = run_trial(config, n, seed);
        r.trial = trial;
        slots[task].result = std::move(r);
      } catch (const NoPairsError& e) {
        slots[task].failure = TrialFailure{n, trial, e.what()};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        aborted.store(true);
        return;
      }
    }
  };

  int thread_count = jobs > 0 ? jobs
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;
  thread_count = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(thread_count), total));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult sweep;
  sweep.config = config;
  for (size_t task = 0; task < total; ++task) {
    if (slots[task].result) sweep.results.push_back(*slots[task].result);
    if (slots[task].failure) sweep.failures.push_back(*slots[task].failure);
  }

  std::vector<double> log_n, log_sub, log_reg;
  for (size_t ni = 0; ni < grid; ++ni) {
    const int n = config.n_grid[ni];
    NAggregate agg;
    agg.n = n;
    std::vector<double> sub, reg;
    for (const TrialResult& r : sweep.results) {
      if (r.n != n) continue;
      sub.push_back(r.subspace_error);
      reg.push_back(r.regression_error);
    }
    for (const TrialFailure& f : sweep.failures) {
      if (f.n == n) ++agg.trials_failed;
    }
    agg.trials_succeeded = static_cast<int>(sub.size());
    agg.trials_run = agg.trials_succeeded + agg.trials_failed;
    if (!sub.empty()) {
      double sm = 0, rm = 0;
      for (double v : sub) sm += v;
      for (double v : reg) rm += v;
      agg.subspace_mean = sm / static_cast<double>(sub.size());
      agg.regression_mean = rm / static_cast<double>(reg.size());
      agg.subspace_std = sample_std(sub, agg.subspace_mean);
      agg.regression_std = sample_std(reg, agg.regression_mean);
      if (agg.subspace_mean > 0.0 && agg.regression_mean > 0.0) {
        log_n.push_back(std::log10(static_cast<double>(n)));
        log_sub.push_back(std::log10(agg.subspace_mean));
        log_reg.push_back(std::log10(agg.regression_mean));
      }
    } else {
      agg.subspace_mean = agg.subspace_std = std::nan("");
      agg.regression_mean = agg.regression_std = std::nan("");
    }
    sweep.aggregates.push_back(agg);
  }
  if (log_n.size() >= 2) {
    sweep.subspace_fit = fit_line(log_n, log_sub);
    sweep.regression_fit = fit_line(log_n, log_reg);
  }
  return sweep;
}

TheoreticalSchedule schedule_from_constants(int n, int ambient_dim,
                                            int intrinsic_dim,
                                            double lipschitz, double bound_b,
                                            double sigma, double c1, double c2,
                                            double c3) {
  if (n < 2) throw std::invalid_argument("schedule: need n >= 2");
  if (ambient_dim < 1 || intrinsic_dim < 1 || intrinsic_dim > ambient_dim) {
    throw std::invalid_argument("schedule: bad dimensions");
  }
  const double ratio = std::log(n) / n;
  TheoreticalSchedule s;
  s.c1 = c1;
  s.c2 = c2;
  s.c3 = c3;
  s.alpha0 = std::max(c2 * std::pow(ratio, 1.0 / ambient_dim),
                      c3 * std::pow(ratio, 1.0 / (ambient_dim + 2)));
  s.alpha = 4.0 * intrinsic_dim * lipschitz * lipschitz * bound_b * bound_b *
                std::pow(ratio, 1.0 / ambient_dim) +
            s.alpha0 + 3.0 * sigma * sigma;
  s.r = c1 * s.alpha0;
  return s;
}

TheoreticalSchedule theoretical_schedule(int n, int ambient_dim,
                                         int intrinsic_dim,
                                         const ScheduleConstants& k) {
  if (!(k.lipschitz > 0.0) || !(k.bound_b > 0.0) || !(k.c0 > 0.0) ||
      !(k.bound_m > 0.0) || k.sigma < 0.0) {
    throw std::invalid_argument("schedule: constants must be positive");
  }
  if (!(k.nu > 2.0)) throw std::invalid_argument("schedule: need nu > 2");
  const double l2 = k.lipschitz * k.lipschitz;
  const double c1 = 1.0 / (4.0 * l2 * std::max(5.0 * k.bound_b, 2.0));
  const double c1_pow = std::pow(c1, ambient_dim - 1);
  const double c2 =
      std::pow(56.0 * k.nu * l2 / (3.0 * k.c0 * c1_pow), 1.0 / ambient_dim);
  const double m_sigma = k.bound_m + k.sigma;
  const double c3 = std::pow(
      256.0 * k.nu * m_sigma * m_sigma * m_sigma * m_sigma * l2 / (k.c0 * c1_pow),
      1.0 / (ambient_dim + 2));
  return schedule_from_constants(n, ambient_dim, intrinsic_dim, k.lipschitz,
                                 k.bound_b, k.sigma, c1, c2, c3);
}

TailConstants tail_constants(double c0, double phi_value, double bound_b,
                             int ambient_dim, int intrinsic_dim,
                             double lipschitz) {
  const double gap = c0 - phi_value;
  const double b2 = bound_b * bound_b;
  TailConstants t;
  t.c4 = gap * gap;
  t.c5 = 1152.0 * b2 * b2;
  t.c6 = 64.0 * b2 * gap;
  t.c7 = t.c5 / t.c4 * (std::log(2.0 * ambient_dim) + 2.0 * ambient_dim + 1.0) +
         8.0 + 8.0 * ambient_dim * t.c6 * t.c6 / (t.c4 * t.c4);
  t.c8 = intrinsic_dim * t.c7 * lipschitz * lipschitz * b2;
  return t;
}

ErrorDecomposition error_decomposition(const ComposedModel& model,
                                       const Dataset& data,
                                       const ExampleSpec& example,
                                       const Matrix& test_x) {
  if (!data.truth()) {
    throw TruthUnavailableError("error_decomposition: dataset has no truth");
  }
  const double dist = projection_distance(model.basis, data.truth()->basis);
  ErrorDecomposition out;
  out.subspace_term = dist * dist;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < test_x.rows(); ++i) {
    const Vector x = test_x.row(i).transpose();
    const Vector z = model.basis.matrix().transpose() * x;
    const double diff = predict_composed(model, x) - example.link(z);
    ss += diff * diff;
  }
  out.regression_term = test_x.rows() > 0 ? ss / static_cast<double>(test_x.rows()) : 0.0;
  return out;
}

void export_pairs(const Dataset& data,
                  std::span<const std::pair<int, int>> pairs,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const int D = data.dim();
  out << "i,j";
  for (int t = 0; t < D; ++t) out << ",xi" << (t + 1);
  for (int t = 0; t < D; ++t) out << ",xj" << (t + 1);
  out << '\n';
  for (const auto& [i, j] : pairs) {
    out << i << ',' << j;
    for (int t = 0; t < D; ++t) out << ',' << format_g17(data.x()(i, t));
    for (int t = 0; t < D; ++t) out << ',' << format_g17(data.x()(j, t));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

AlphaRule alpha_rule_from_json(const nlohmann::json& doc) {
  for (const auto& [key, unused] : doc.items()) {
    if (key != "kind" && key != "c") {
      throw ConfigError("alpha_rule: unknown key '" + key + "'");
    }
  }
  const std::string kind = doc.at("kind").get<std::string>();
  AlphaRule rule;
  rule.c = doc.at("c").get<double>();
  if (kind == "scaled") rule.kind = AlphaRule::Kind::kScaled;
  else if (kind == "absolute") rule.kind = AlphaRule::Kind::kAbsolute;
  else if (kind == "inverse") rule.kind = AlphaRule::Kind::kInverse;
  else throw ConfigError("alpha_rule.kind: expected scaled|absolute|inverse");
  return rule;
}

RadiusRule r_rule_from_json(const nlohmann::json& doc) {
  for (const auto& [key, unused] : doc.items()) {
    if (key != "kind" && key != "c") {
      throw ConfigError("r_rule: unknown key '" + key + "'");
    }
  }
  const std::string kind = doc.at("kind").get<std::string>();
  RadiusRule rule;
  rule.c = doc.at("c").get<double>();
  if (kind == "scaled") rule.kind = RadiusRule::Kind::kScaled;
  else if (kind == "absolute") rule.kind = RadiusRule::Kind::kAbsolute;
  else throw ConfigError("r_rule.kind: expected scaled|absolute");
  return rule;
}

std::string alpha_kind_name(AlphaRule::Kind k) {
  switch (k) {
    case AlphaRule::Kind::kScaled: return "scaled";
    case AlphaRule::Kind::kAbsolute: return "absolute";
    case AlphaRule::Kind::kInverse: return "inverse";
  }
  return "?";
}

nlohmann::json aggregate_to_json(const NAggregate& a) {
  nlohmann::json doc;
  doc["n"] = a.n;
  doc["trials_run"] = a.trials_run;
  doc["trials_succeeded"] = a.trials_succeeded;
  doc["trials_failed"] = a.trials_failed;
  if (a.trials_succeeded > 0) {
    doc["subspace_mean"] = a.subspace_mean;
    doc["subspace_std"] = a.subspace_std;
    doc["regression_mean"] = a.regression_mean;
    doc["regression_std"] = a.regression_std;
  } else {
    doc["subspace_mean"] = nullptr;
    doc["subspace_std"] = nullptr;
    doc["regression_mean"] = nullptr;
    doc["regression_std"] = nullptr;
  }
  return doc;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {
      "example",  "method",     "d",          "noise_percent",
      "n_grid",   "trials",     "alpha_rule", "r_rule",
      "regressor", "smoothness", "slice_target", "master_seed"};
  for (const auto& [key, unused] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig config;
  try {
    config.example_id = doc.at("example").get<std::string>();
    config.method = method_from_name(doc.at("method").get<std::string>());
    config.d = doc.at("d").get<int>();
    config.n_grid = doc.at("n_grid").get<std::vector<int>>();
    config.trials = doc.at("trials").get<int>();
    config.master_seed = doc.at("master_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (doc.contains("noise_percent")) {
    config.noise_percent = doc.at("noise_percent").get<double>();
  }
  if (doc.contains("smoothness")) {
    config.smoothness = doc.at("smoothness").get<double>();
  }
  if (doc.contains("slice_target")) {
    config.slice_target = doc.at("slice_target").get<int>();
  }
  if (doc.contains("alpha_rule")) {
    config.alpha_rule = alpha_rule_from_json(doc.at("alpha_rule"));
  }
  if (doc.contains("r_rule")) {
    config.r_rule = r_rule_from_json(doc.at("r_rule"));
  }
  if (doc.contains("regressor")) {
    const std::string r = doc.at("regressor").get<std::string>();
    if (r == "piecewise_poly" || r == "PIECEWISE_POLY") {
      config.regressor = RegressorKind::kPiecewisePoly;
    } else if (r == "kernel" || r == "KERNEL") {
      config.regressor = RegressorKind::kKernel;
    } else {
      throw ConfigError("regressor: expected piecewise_poly or kernel");
    }
  }
  return resolve_defaults(config);
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json doc;
  doc["example"] = config.example_id;
  doc["method"] = method_name(config.method);
  doc["d"] = config.d;
  doc["noise_percent"] = config.noise_percent;
  doc["n_grid"] = config.n_grid;
  doc["trials"] = config.trials;
  if (config.alpha_rule) {
    doc["alpha_rule"] = {{"kind", alpha_kind_name(config.alpha_rule->kind)},
                         {"c", config.alpha_rule->c}};
  }
  if (config.r_rule) {
    doc["r_rule"] = {
        {"kind", config.r_rule->kind == RadiusRule::Kind::kScaled ? "scaled"
                                                                  : "absolute"},
        {"c", config.r_rule->c}};
  }
  doc["regressor"] = config.regressor == RegressorKind::kPiecewisePoly
                         ? "piecewise_poly"
                         : "kernel";
  doc["smoothness"] = config.smoothness;
  if (config.slice_target) doc["slice_target"] = *config.slice_target;
  doc["master_seed"] = config.master_seed;
  return doc;
}

nlohmann::json sweep_to_json(const SweepResult& sweep) {
  nlohmann::json doc;
  doc["config"] = config_to_json(sweep.config);
  nlohmann::json results = nlohmann::json::array();
  for (const TrialResult& r : sweep.results) {
    nlohmann::json item;
    item["n"] = r.n;
    item["trial"] = r.trial;
    item["subspace_error"] = r.subspace_error;
    item["regression_error"] = r.regression_error;
    if (r.n_alpha) item["n_alpha"] = *r.n_alpha;
    results.push_back(std::move(item));
  }
  doc["results"] = std::move(results);
  nlohmann::json failures = nlohmann::json::array();
  for (const TrialFailure& f : sweep.failures) {
    failures.push_back({{"n", f.n}, {"trial", f.trial}, {"reason", f.reason}});
  }
  doc["failures"] = std::move(failures);
  nlohmann::json aggregates = nlohmann::json::array();
  for (const NAggregate& a : sweep.aggregates) aggregates.push_back(aggregate_to_json(a));
  doc["aggregates"] = std::move(aggregates);
  auto fit_json = [](const std::optional<LineFit>& f) -> nlohmann::json {
    if (!f) return nullptr;
    return {{"slope", f->slope}, {"intercept", f->intercept}};
  };
  doc["subspace_fit"] = fit_json(sweep.subspace_fit);
  doc["regression_fit"] = fit_json(sweep.regression_fit);
  return doc;
}

void write_sweep_json(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << sweep_to_json(sweep).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "n,subspace_mean,subspace_std,regression_mean,regression_std,failures\n";
  for (const NAggregate& a : sweep.aggregates) {
    out << a.n << ',';
    if (a.trials_succeeded > 0) {
      out << format_g17(a.subspace_mean) << ',' << format_g17(a.subspace_std)
          << ',' << format_g17(a.regression_mean) << ','
          << format_g17(a.regression_std);
    } else {
      out << ",,,";
    }
    out << ',' << a.trials_failed << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

SweepSummary read_sweep_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad sweep file " + path + ": " + e.what());
  }
  SweepSummary summary;
  try {
    summary.method = doc.at("config").at("method").get<std::string>();
    summary.example_id = doc.at("config").at("example").get<std::string>();
    for (const auto& item : doc.at("aggregates")) {
      NAggregate a;
      a.n = item.at("n").get<int>();
      a.trials_run = item.at("trials_run").get<int>();
      a.trials_succeeded = item.at("trials_succeeded").get<int>();
      a.trials_failed = item.at("trials_failed").get<int>();
      if (a.trials_succeeded > 0) {
        a.subspace_mean = item.at("subspace_mean").get<double>();
        a.subspace_std = item.at("subspace_std").get<double>();
        a.regression_mean = item.at("regression_mean").get<double>();
        a.regression_std = item.at("regression_std").get<double>();
      } else {
        a.subspace_mean = a.subspace_std = std::nan("");
        a.regression_mean = a.regression_std = std::nan("");
      }
      summary.aggregates.push_back(a);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad sweep file " + path + ": " + e.what());
  }
  return summary;
}

std::string merge_report(const std::vector<SweepSummary>& sweeps) {
  if (sweeps.empty()) throw std::invalid_argument("merge_report: no sweeps");
  // Column labels; duplicates get a numeric suffix.
  std::vector<std::string> labels;
  std::map<std::string, int> seen;
  for (const SweepSummary& s : sweeps) {
    const int count = ++seen[s.method];
    labels.push_back(count == 1 ? s.method
                                : s.method + "_" + std::to_string(count));
  }

  std::set<int> all_n;
  bool mismatched = false;
  for (const SweepSummary& s : sweeps) {
    for (const NAggregate& a : s.aggregates) all_n.insert(a.n);
  }
  for (const SweepSummary& s : sweeps) {
    if (s.aggregates.size() != all_n.size()) mismatched = true;
  }
  if (mismatched) {
    std::cerr << "warning: sweeps have mismatched n grids; "
                 "emitting the union with blanks\n";
  }

  std::ostringstream out;
  out << "n";
  for (const std::string& label : labels) {
    out << ',' << label << "_subspace_mean" << ',' << label << "_subspace_std"
        << ',' << label << "_regression_mean" << ',' << label
        << "_regression_std" << ',' << label << "_failures";
  }
  out << '\n';
  for (int n : all_n) {
    out << n;
    for (const SweepSummary& s : sweeps) {
      const NAggregate* found = nullptr;
      for (const NAggregate& a : s.aggregates) {
        if (a.n == n) found = &a;
      }
      if (found && found->trials_succeeded > 0) {
        out << ',' << format_g17(found->subspace_mean) << ','
            << format_g17(found->subspace_std) << ','
            << format_g17(found->regression_mean) << ','
            << format_g17(found->regression_std) << ','
            << found->trials_failed;
      } else if (found) {
        out << ",,,,," << found->trials_failed;
      } else {
        out << ",,,,,";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gcreg
