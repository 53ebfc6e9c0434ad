#pragma once

// Declarative experiment specs and the command implementations behind the
// deepbalance CLI. A spec file is a list of "key = value" lines ("key: value"
// is accepted too); '#' starts a comment and lists are comma separated. See
// README.md for every key.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deepbalance/data.hpp"
#include "deepbalance/ensemble.hpp"
#include "deepbalance/report.hpp"

namespace deepbalance {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,     // bad flags, spec keys or parameter values
  kExitInput = 3,     // missing or unreadable file, malformed CSV/model
  kExitPartial = 4,   // some benchmark/sweep cells failed; outputs still written
  kExitTraining = 5,  // split, resampling or training failed
};

struct DataSource {
  enum class Kind { Synthetic, Csv };
  Kind kind = Kind::Synthetic;
  std::filesystem::path path;
  CsvSchema schema;
  // Keep at most this many majority rows (sampled without replacement) after
  // loading; 0 keeps all.
  std::size_t max_majority = 0;

  std::size_t n_majority = 20000;
  std::size_t n_minority = 200;
  std::size_t dims = 10;
  double separation = 3.0;
  std::uint64_t synth_seed = 7;
};

struct MethodSpec {
  enum class Kind { DeepBalance, AllFeatures, Baseline };
  Kind kind = Kind::DeepBalance;
  ResampleMethod resample = BalancedBootstrap{};
  std::string label;  // name used in reports
};

struct ExperimentSpec {
  DataSource data;
  std::vector<MethodSpec> methods;
  double split = 0.7;
  double threshold = 0.5;
  std::vector<std::uint64_t> seeds{42};
  std::size_t workers = 1;
  std::filesystem::path out = "deepbalance-out";

  // DeepBalance and all-features ensembles. config.seed is replaced by the
  // run seed.
  TrainConfig deepbalance;
  // Single-DBN baselines.
  DbnHyperparams baseline_dbn;
  std::size_t oversample_x = 1000;
  std::size_t smote_k = 5;
  std::size_t smote_multiplier = 2;

  std::string sweep_parameter = "total_nets";
  std::vector<std::size_t> sweep_values;

  ExperimentSpec();
};

// Applies one "key = value" setting. Throws ConfigError for unknown keys or
// unparseable values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& path);
// Throws ConfigError.
void validate(const ExperimentSpec& spec);

// "deepbalance", "allfeatures", "undersample", "oversample", "smote", "none".
MethodSpec parse_method(const std::string& token, const ExperimentSpec& spec);
// "a,b,c", with "a..b" and "a..b:step" ranges.
std::vector<std::size_t> parse_count_list(const std::string& text);

// Applies a named preset ("creditcard" or "paysim") to the data schema.
void apply_preset(DataSource& data, const std::string& preset);

Dataset load_dataset(const DataSource& data);

struct CellResult {
  MetricsRow metrics;
  std::optional<RocSeries> roc;
  std::optional<EnsembleModel> model;
  double train_seconds = 0.0;
};

// Train one method on the seed's split and score the held-out part.
// Failures are captured in metrics.error.
CellResult run_cell(const ExperimentSpec& spec, const MethodSpec& method, const SplitResult& split,
                    std::uint64_t seed, bool keep_model);

// Command entry points. Each writes its outputs under spec.out (a directory,
// or the CSV file itself for gen-synth), prints a short summary to `log`,
// and returns an ExitCode. Exceptions map to exit codes in run_command().
int cmd_train(const ExperimentSpec& spec, std::ostream& log);
int cmd_benchmark(const ExperimentSpec& spec, std::ostream& log);
int cmd_sweep(const ExperimentSpec& spec, std::ostream& log);
int cmd_gen_synth(const ExperimentSpec& spec, std::ostream& log);
int cmd_evaluate(const ExperimentSpec& spec, const std::filesystem::path& model_path,
                 std::ostream& log);

struct SweepRow {
  std::size_t value = 0;
  double mean_auc = 0.0;
  double sd_auc = 0.0;
  double mean_train_seconds = 0.0;
  double median_train_seconds = 0.0;  // not written to sweep.csv
  std::size_t failures = 0;
};
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

// Runs `body`, turning exceptions into an exit code and a one-line JSON error
// summary on `err`.
int run_command(std::ostream& err, const std::function<int()>& body);

}  // namespace deepbalance
