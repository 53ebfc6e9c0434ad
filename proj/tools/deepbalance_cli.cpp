// deepbalance: train, benchmark and sweep balanced-bootstrap DBN ensembles.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepbalance/errors.hpp"
#include "deepbalance/experiment.hpp"
#include "deepbalance/kernels.hpp"

using namespace deepbalance;

int main(int argc, char** argv) {
  CLI::App app{"DeepBalance: ensembles of deep belief networks on balanced bootstraps"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<double> threshold;
  std::optional<std::string> out;
  std::vector<std::string> settings;
  app.add_option("--spec", spec_path, "Experiment spec file (key = value lines)");
  app.add_option("--seed", seed, "Run seed (overrides the spec's seeds; synthetic seed for gen-synth)");
  app.add_option("--workers", workers, "Worker threads for ensemble training");
  app.add_option("--threshold", threshold, "Decision threshold (default 0.5)");
  app.add_option("--out", out, "Output directory (output CSV file for gen-synth)");
  app.add_option("--set", settings, "Override a spec key, e.g. --set mtry=3")->take_all();
  app.add_flag_callback("--simd-info", [] {
    std::cout << "active kernels: " << kernels::active().name << '\n';
    std::exit(0);
  }, "Print the selected SIMD kernel set and exit");

  auto* train = app.add_subcommand("train", "Train one model and score the held-out split");
  std::string train_method;
  train->add_option("--method", train_method, "deepbalance, allfeatures, undersample, oversample, smote or none");

  auto* bench = app.add_subcommand("benchmark", "Compare methods over seeds");
  std::string bench_methods;
  bench->add_option("--methods", bench_methods, "Comma-separated method list");

  auto* sweep = app.add_subcommand("sweep", "Sweep mtry, max_it or total_nets");
  std::string sweep_param;
  std::string sweep_values;
  sweep->add_option("--parameter", sweep_param, "mtry, max_it or total_nets");
  sweep->add_option("--values", sweep_values, "Values, e.g. 1..10 or 20..100:20");

  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic imbalanced dataset as CSV");
  std::optional<std::size_t> n_majority, n_minority, dims;
  std::optional<double> separation;
  gen->add_option("--n-majority", n_majority);
  gen->add_option("--n-minority", n_minority);
  gen->add_option("--d", dims, "Feature count");
  gen->add_option("--separation", separation, "Minority mean offset per feature");

  auto* eval = app.add_subcommand("evaluate", "Score a saved model against a CSV");
  std::string model_path;
  std::string data_path;
  std::string label;
  std::string preset;
  eval->add_option("--model", model_path, "Model bundle (model.json)")->required();
  eval->add_option("--data", data_path, "CSV to score");
  eval->add_option("--label", label, "Label column");
  eval->add_option("--preset", preset, "creditcard or paysim");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  return run_command(std::cerr, [&]() -> int {
    ExperimentSpec spec = spec_path.empty() ? ExperimentSpec{} : load_spec(spec_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(spec, s.substr(0, eq), s.substr(eq + 1));
    }
    if (workers) spec.workers = *workers;
    if (threshold) spec.threshold = *threshold;
    if (out) spec.out = *out;

    if (gen->parsed()) {
      if (seed) spec.data.synth_seed = *seed;
      if (n_majority) spec.data.n_majority = *n_majority;
      if (n_minority) spec.data.n_minority = *n_minority;
      if (dims) spec.data.dims = *dims;
      if (separation) spec.data.separation = *separation;
      if (!out) spec.out = "synthetic.csv";
      return cmd_gen_synth(spec, std::cout);
    }
    if (seed) spec.seeds = {*seed};
    if (train->parsed()) {
      if (!train_method.empty()) spec.methods = {parse_method(train_method, spec)};
      return cmd_train(spec, std::cout);
    }
    if (bench->parsed()) {
      if (!bench_methods.empty()) apply_setting(spec, "methods", bench_methods);
      return cmd_benchmark(spec, std::cout);
    }
    if (sweep->parsed()) {
      if (!sweep_param.empty()) apply_setting(spec, "sweep.parameter", sweep_param);
      if (!sweep_values.empty()) apply_setting(spec, "sweep.values", sweep_values);
      return cmd_sweep(spec, std::cout);
    }
    if (!preset.empty()) apply_preset(spec.data, preset);
    if (!data_path.empty()) {
      spec.data.kind = DataSource::Kind::Csv;
      spec.data.path = data_path;
    }
    if (!label.empty()) spec.data.schema.label_column = label;
    if (spec.data.schema.label_column.empty()) spec.data.schema.label_column = "label";
    return cmd_evaluate(spec, model_path, std::cout);
  });
}
