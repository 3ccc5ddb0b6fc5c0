// Command-line front end: dataset generation, fitting, sample-size sweeps,
// and report merging. Exit codes: 0 success, 2 usage/config, 3 I/O,
// 4 algorithmic failure (no qualifying pairs).

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gcreg/dataset.hpp"
#include "gcreg/errors.hpp"
#include "gcreg/harness.hpp"
#include "gcreg/synthetic.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitAlgorithm = 4;

int cmd_gen(const std::string& example, int n, double noise,
            std::uint64_t seed, const std::string& out) {
  const gcreg::Dataset data =
      gcreg::make_example(example, n, gcreg::NoiseSpec{noise, seed}, seed);
  gcreg::write_dataset_csv(data, out);
  gcreg::write_truth_json(data, gcreg::truth_sidecar_path(out));
  std::cerr << "wrote " << out << " and " << gcreg::truth_sidecar_path(out)
            << "\n";
  return 0;
}

struct FitArgs {
  std::string input;
  std::string method = "GCR";
  int d = 1;
  std::optional<double> alpha;
  std::optional<double> radius;
  int slices = 200;
  std::string regressor = "piecewise_poly";
  double smoothness = 2.0;
  std::string out_model;
  std::string out_pairs;
};

int cmd_fit(const FitArgs& args) {
  const gcreg::Dataset data = gcreg::read_dataset_csv(
      args.input, gcreg::truth_sidecar_path(args.input));
  const gcreg::Method method = gcreg::method_from_name(args.method);

  std::optional<double> alpha = args.alpha;
  std::optional<double> radius = args.radius;
  const bool needs_alpha =
      method == gcreg::Method::kGcr || method == gcreg::Method::kScr;
  if (needs_alpha && !alpha) {
    if (!data.truth()) {
      throw gcreg::ConfigError(
          "--alpha is required when the dataset has no truth sidecar");
    }
    alpha = gcreg::default_alpha_rule(data.truth()->example_id, method,
                                      data.truth()->noise_percent)
                .evaluate(data.size(), data.dim());
  }
  if (method == gcreg::Method::kGcr && !radius) {
    const std::string id = data.truth() ? data.truth()->example_id : "";
    radius = gcreg::default_r_rule(id).evaluate(data.size(), data.dim());
  }

  gcreg::RegressorKind regressor;
  if (args.regressor == "piecewise_poly" || args.regressor == "PIECEWISE_POLY") {
    regressor = gcreg::RegressorKind::kPiecewisePoly;
  } else if (args.regressor == "kernel" || args.regressor == "KERNEL") {
    regressor = gcreg::RegressorKind::kKernel;
  } else {
    throw gcreg::ConfigError("--regressor: expected piecewise_poly or kernel");
  }

  const gcreg::FitOutcome outcome =
      gcreg::fit_pipeline(data, method, args.d, alpha, radius, args.slices,
                          regressor, args.smoothness);
  if (outcome.subspace_error) {
    std::cout << "subspace_error=" << gcreg::format_g17(*outcome.subspace_error)
              << "\n";
  }
  if (outcome.n_alpha) {
    std::cout << "n_alpha=" << *outcome.n_alpha << "\n";
  }
  if (!args.out_model.empty()) {
    gcreg::write_composed_model(outcome.model, args.out_model);
  }
  if (!args.out_pairs.empty()) {
    gcreg::export_pairs(data, outcome.pairs, args.out_pairs);
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out,
                   int jobs) {
  const gcreg::ExperimentConfig config = gcreg::read_config(config_path);
  const gcreg::SweepResult sweep = gcreg::run_sweep(config, jobs);

  std::string base = out;
  const std::string ext = ".json";
  if (base.size() > ext.size() &&
      base.compare(base.size() - ext.size(), ext.size(), ext) == 0) {
    base = base.substr(0, base.size() - ext.size());
  }
  gcreg::write_sweep_json(sweep, base + ".json");
  gcreg::write_sweep_csv(sweep, base + ".csv");

  if (sweep.subspace_fit) {
    std::cout << "subspace_slope=" << gcreg::format_g17(sweep.subspace_fit->slope)
              << "\n";
    std::cout << "regression_slope="
              << gcreg::format_g17(sweep.regression_fit->slope) << "\n";
  } else {
    std::cout << "subspace_slope=nan\nregression_slope=nan\n";
  }
  for (const gcreg::NAggregate& a : sweep.aggregates) {
    std::cerr << "n=" << a.n << " ok=" << a.trials_succeeded
              << " failed=" << a.trials_failed;
    if (a.trials_succeeded > 0) {
      std::cerr << " subspace_mean=" << a.subspace_mean
                << " regression_mean=" << a.regression_mean;
    }
    std::cerr << "\n";
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs,
               const std::string& out) {
  std::vector<gcreg::SweepSummary> summaries;
  summaries.reserve(inputs.size());
  for (const std::string& path : inputs) {
    summaries.push_back(gcreg::read_sweep_summary(path));
  }
  const std::string table = gcreg::merge_report(summaries);
  if (out.empty()) {
    std::cout << table;
  } else {
    std::ofstream file(out);
    if (!file) throw gcreg::IoError("cannot open for writing: " + out);
    file << table;
    if (!file) throw gcreg::IoError("write failed: " + out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active-subspace estimation (GCR/SCR/SIR) with stage-two "
               "nonparametric regression and a synthetic benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string gen_example;
  int gen_n = 0;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--example", gen_example, "Example id (1, 2a, 2b, 3, 4, 5, 6)")
      ->required();
  gen->add_option("--n", gen_n, "Number of samples")->required();
  gen->add_option("--noise", gen_noise, "Relative noise percent")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a subspace + regressor");
  FitArgs fit_args;
  fit->add_option("--in", fit_args.input, "Dataset CSV")->required();
  fit->add_option("--method", fit_args.method, "GCR | SCR | SIR | AMBIENT")->capture_default_str();
  fit->add_option("--d", fit_args.d, "Subspace dimension")->capture_default_str();
  double fit_alpha = 0.0, fit_r = 0.0;
  auto* alpha_opt = fit->add_option("--alpha", fit_alpha, "Connection threshold");
  auto* r_opt = fit->add_option("--r", fit_r, "Tube radius (GCR)");
  fit->add_option("--slices", fit_args.slices, "SIR samples per slice")->capture_default_str();
  fit->add_option("--regressor", fit_args.regressor, "piecewise_poly | kernel")->capture_default_str();
  fit->add_option("--smoothness", fit_args.smoothness,
                  "Assumed Hoelder smoothness")
      ->capture_default_str();
  fit->add_option("--out-model", fit_args.out_model, "Model JSON path");
  fit->add_option("--out-pairs", fit_args.out_pairs, "Connected-pairs CSV path");

  // experiment
  auto* experiment =
      app.add_subcommand("experiment", "Run a configured sample-size sweep");
  std::string exp_config, exp_out;
  int exp_jobs = 0;
  experiment->add_option("--config", exp_config, "Config JSON")->required();
  experiment->add_option("--out", exp_out, "Output base path (.json/.csv)")
      ->required();
  experiment->add_option("--jobs", exp_jobs,
                         "Worker threads (default: available parallelism)");

  // report
  auto* report =
      app.add_subcommand("report", "Merge sweep JSONs into one CSV table");
  std::vector<std::string> report_in;
  std::string report_out;
  report->add_option("--in", report_in, "Sweep JSON files")->required();
  report->add_option("--out", report_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_example, gen_n, gen_noise, gen_seed, gen_out);
    }
    if (fit->parsed()) {
      if (alpha_opt->count() > 0) fit_args.alpha = fit_alpha;
      if (r_opt->count() > 0) fit_args.radius = fit_r;
      return cmd_fit(fit_args);
    }
    if (experiment->parsed()) {
      return cmd_experiment(exp_config, exp_out, exp_jobs);
    }
    if (report->parsed()) {
      return cmd_report(report_in, report_out);
    }
  } catch (const gcreg::NoPairsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAlgorithm;
  } catch (const gcreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gcreg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
