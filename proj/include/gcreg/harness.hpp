#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gcreg/dataset.hpp"
#include "gcreg/estimators.hpp"
#include "gcreg/regression.hpp"
#include "gcreg/synthetic.hpp"

namespace gcreg {

enum class Method { kGcr, kScr, kSir, kAmbient };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

enum class RegressorKind { kPiecewisePoly, kKernel };

/// Connection-threshold schedule: C * n^(-1/D), a constant, or C / n.
struct AlphaRule {
  enum class Kind { kScaled, kAbsolute, kInverse };
  Kind kind = Kind::kScaled;
  double c = 1.0;
  double evaluate(int n, int ambient_dim) const;
};

/// Tube-radius schedule: C * n^(-1/D) or a constant.
struct RadiusRule {
  enum class Kind { kScaled, kAbsolute };
  Kind kind = Kind::kScaled;
  double c = 2.0;
  double evaluate(int n, int ambient_dim) const;
};

/// Per-benchmark defaults for the thresholds used in the comparison runs.
AlphaRule default_alpha_rule(const std::string& example_id, Method method,
                             double noise_percent);
RadiusRule default_r_rule(const std::string& example_id);

struct ExperimentConfig {
  std::string example_id;
  Method method = Method::kGcr;
  int d = 1;
  double noise_percent = 0.0;
  std::vector<int> n_grid;
  int trials = 1;
  std::optional<AlphaRule> alpha_rule;  // default: per-example table
  std::optional<RadiusRule> r_rule;     // default: 2 n^(-1/D)
  RegressorKind regressor = RegressorKind::kPiecewisePoly;
  double smoothness = 2.0;
  std::optional<int> slice_target;      // SIR, default 200
  std::uint64_t master_seed = 0;
};

/// Fills the optional fields from the defaults table and validates.
ExperimentConfig resolve_defaults(const ExperimentConfig& config);

struct TrialResult {
  int n = 0;
  int trial = 0;
  double subspace_error = 1.0;   // AMBIENT reports the 1.0 sentinel
  double regression_error = 0.0; // test RMSE
  std::optional<int> n_alpha;    // GCR only
  double wall_time_seconds = 0.0;  // not serialized (kept reproducible)
};

struct TrialFailure {
  int n = 0;
  int trial = 0;
  std::string reason;
};

struct NAggregate {
  int n = 0;
  int trials_run = 0;
  int trials_succeeded = 0;
  int trials_failed = 0;
  double subspace_mean = 0.0, subspace_std = 0.0;
  double regression_mean = 0.0, regression_std = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

struct SweepResult {
  ExperimentConfig config;  // resolved
  std::vector<TrialResult> results;    // sorted by (n, trial)
  std::vector<TrialFailure> failures;  // sorted by (n, trial)
  std::vector<NAggregate> aggregates;  // ascending n
  std::optional<LineFit> subspace_fit;    // log10 mean error vs log10 n
  std::optional<LineFit> regression_fit;
};

/// Subspace estimate + stage-two regressor fitted on one training set.
struct FitOutcome {
  ComposedModel model;
  std::optional<double> subspace_error;  // set when truth is available
  std::optional<int> n_alpha;
  std::vector<std::pair<int, int>> pairs;  // GCR / SCR connections
};

/// Runs the configured subspace method and regressor on a training set.
/// AMBIENT skips subspace estimation (identity basis). alpha/radius must be
/// resolved values (not rules).
FitOutcome fit_pipeline(const Dataset& train, Method method, int d,
                        std::optional<double> alpha,
                        std::optional<double> radius, int slice_target,
                        RegressorKind regressor, double smoothness);

/// One benchmark trial: generate n samples, hold out the last ceil(n/10)
/// for testing, fit on the rest, report the projection distance to the
/// planted subspace and the test RMSE. Propagates NoPairsError.
TrialResult run_trial(const ExperimentConfig& config, int n,
                      std::uint64_t trial_seed);

/// All trials over the n-grid with seeds derived from the master seed.
/// `jobs` <= 0 means hardware concurrency. Results are ordered by
/// (n, trial) regardless of scheduling.
SweepResult run_sweep(const ExperimentConfig& config, int jobs = 0);

/// Ordinary least squares line fit.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Constants feeding the theoretical threshold schedule.
struct ScheduleConstants {
  double lipschitz = 1.0;  // L_g > 0
  double bound_b = 1.0;    // B > 0
  double sigma = 0.0;      // noise bound >= 0
  double c0 = 1.0;         // tube-measure constant > 0
  double bound_m = 1.0;    // |g| bound M > 0
  double nu = 3.0;         // > 2
};

struct TheoreticalSchedule {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double alpha0 = 0.0, alpha = 0.0, r = 0.0;
};

/// Evaluates the theoretical (alpha0, alpha, r) schedule. Formula
/// evaluation only; the constants are not estimable from data.
TheoreticalSchedule theoretical_schedule(int n, int ambient_dim,
                                         int intrinsic_dim,
                                         const ScheduleConstants& constants);

/// Same with externally supplied C1..C3 (bypasses constant construction).
TheoreticalSchedule schedule_from_constants(int n, int ambient_dim,
                                            int intrinsic_dim,
                                            double lipschitz, double bound_b,
                                            double sigma, double c1, double c2,
                                            double c3);

/// The tail constants C4..C8 as closed-form expressions.
struct TailConstants {
  double c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0, c8 = 0.0;
};
TailConstants tail_constants(double c0, double phi_value, double bound_b,
                             int ambient_dim, int intrinsic_dim,
                             double lipschitz);

struct ErrorDecomposition {
  double subspace_term = 0.0;   // projection distance squared
  double regression_term = 0.0; // mean squared g^ vs g at projected inputs
};

/// Diagnostic split of the prediction error. Requires the dataset's truth
/// and the example's link function. The regression term compares g^ and g
/// at the same projected inputs.
ErrorDecomposition error_decomposition(const ComposedModel& model,
                                       const Dataset& data,
                                       const ExampleSpec& example,
                                       const Matrix& test_x);

/// Writes `i,j,x_i...,x_j...` rows for external plotting of connections.
void export_pairs(const Dataset& data,
                  std::span<const std::pair<int, int>> pairs,
                  const std::string& path);

/// Config file IO. Unknown keys are rejected with the offending key named.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig read_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

nlohmann::json sweep_to_json(const SweepResult& sweep);
void write_sweep_json(const SweepResult& sweep, const std::string& path);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);

/// The slice of a sweep file the report command needs.
struct SweepSummary {
  std::string method;
  std::string example_id;
  std::vector<NAggregate> aggregates;
};
SweepSummary read_sweep_summary(const std::string& path);

/// Wide per-n table with one column block per input sweep; mismatched
/// n-grids produce a union with blanks and a warning on stderr.
std::string merge_report(const std::vector<SweepSummary>& sweeps);

}  // namespace gcreg
