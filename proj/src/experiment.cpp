#include "deepbalance/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "deepbalance/csv.hpp"
#include "deepbalance/errors.hpp"
#include "deepbalance/metrics.hpp"
#include "deepbalance/serialize.hpp"

namespace deepbalance {

namespace {

constexpr std::uint64_t kSubsampleStream = 0x5355'4253'4D50ULL;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("spec key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("spec key '" + key + "': expected a boolean, got '" + text + "'");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::filesystem::path ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

// Resample options live on the spec; rebuild method variants after every
// setting so "smote.k" works regardless of key order.
void refresh_methods(ExperimentSpec& spec) {
  for (auto& m : spec.methods) {
    if (auto* o = std::get_if<Oversample>(&m.resample)) o->target_count = spec.oversample_x;
    if (auto* s = std::get_if<Smote>(&m.resample)) {
      s->k_neighbors = spec.smote_k;
      s->amount_multiplier = spec.smote_multiplier;
    }
  }
}

}  // namespace

ExperimentSpec::ExperimentSpec() {
  baseline_dbn.max_it = 100;
  for (const char* m : {"deepbalance", "undersample", "oversample", "smote", "none"}) {
    methods.push_back(parse_method(m, *this));
  }
  sweep_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

MethodSpec parse_method(const std::string& token, const ExperimentSpec& spec) {
  const std::string t = trim(token);
  MethodSpec m;
  m.label = t;
  if (t == "deepbalance") {
    m.kind = MethodSpec::Kind::DeepBalance;
  } else if (t == "allfeatures") {
    m.kind = MethodSpec::Kind::AllFeatures;
  } else if (t == "undersample") {
    m.kind = MethodSpec::Kind::Baseline;
    m.resample = Undersample{};
  } else if (t == "oversample") {
    m.kind = MethodSpec::Kind::Baseline;
    m.resample = Oversample{spec.oversample_x};
  } else if (t == "smote") {
    m.kind = MethodSpec::Kind::Baseline;
    m.resample = Smote{spec.smote_k, spec.smote_multiplier};
  } else if (t == "none") {
    m.kind = MethodSpec::Kind::Baseline;
    m.resample = NoResampling{};
  } else {
    throw ConfigError("unknown method '" + t +
                      "' (expected deepbalance, allfeatures, undersample, oversample, smote, none)");
  }
  return m;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_number<std::size_t>("list", item));
      continue;
    }
    const auto colon = item.find(':', dots);
    const auto lo = parse_number<std::size_t>("list", item.substr(0, dots));
    const auto hi = parse_number<std::size_t>(
        "list", item.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
    const auto step =
        colon == std::string::npos ? std::size_t{1} : parse_number<std::size_t>("list", item.substr(colon + 1));
    if (step == 0 || hi < lo) throw ConfigError("invalid range '" + item + "'");
    for (std::size_t v = lo; v <= hi; v += step) values.push_back(v);
  }
  if (values.empty()) throw ConfigError("empty value list");
  return values;
}

void apply_preset(DataSource& data, const std::string& preset) {
  if (preset == "creditcard") {
    data.kind = DataSource::Kind::Csv;
    data.schema.label_column = "Class";
    data.schema.positive_label = "1";
    data.schema.drop_columns = {"Time"};
    data.schema.categorical_columns.clear();
    data.schema.feature_columns.clear();
  } else if (preset == "paysim") {
    data.kind = DataSource::Kind::Csv;
    data.schema.label_column = "isFraud";
    data.schema.positive_label = "1";
    data.schema.drop_columns.clear();
    data.schema.categorical_columns = {"type"};
    data.schema.feature_columns = {"type",           "amount",         "oldbalanceOrg",
                                   "newbalanceOrig", "oldbalanceDest", "newbalanceDest"};
  } else {
    throw ConfigError("unknown data preset '" + preset + "' (expected creditcard or paysim)");
  }
}

void apply_setting(ExperimentSpec& spec, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  auto& d = spec.data;
  auto& cfg = spec.deepbalance;
  const auto count = [&] { return parse_number<std::size_t>(key, value); };
  const auto real = [&] { return parse_number<double>(key, value); };

  if (key == "data.source") {
    if (value == "synthetic") {
      d.kind = DataSource::Kind::Synthetic;
    } else if (value == "csv") {
      d.kind = DataSource::Kind::Csv;
    } else {
      throw ConfigError("data.source must be synthetic or csv");
    }
  } else if (key == "data.path") {
    d.path = value;
    d.kind = DataSource::Kind::Csv;
  } else if (key == "data.preset") {
    apply_preset(d, value);
  } else if (key == "label" || key == "data.label") {
    d.schema.label_column = value;
  } else if (key == "data.positive_label") {
    d.schema.positive_label = value;
  } else if (key == "features" || key == "data.features") {
    d.schema.feature_columns = value == "all" ? std::vector<std::string>{} : split_list(value);
  } else if (key == "data.drop") {
    d.schema.drop_columns = split_list(value);
  } else if (key == "data.categorical") {
    d.schema.categorical_columns = split_list(value);
  } else if (key == "data.max_majority") {
    d.max_majority = count();
  } else if (key == "synth.n_majority") {
    d.n_majority = count();
  } else if (key == "synth.n_minority") {
    d.n_minority = count();
  } else if (key == "synth.d") {
    d.dims = count();
  } else if (key == "synth.separation") {
    d.separation = real();
  } else if (key == "synth.seed") {
    d.synth_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "split") {
    spec.split = real();
  } else if (key == "threshold") {
    spec.threshold = real();
  } else if (key == "seeds" || key == "seed") {
    spec.seeds.clear();
    for (std::size_t s : parse_count_list(value)) spec.seeds.push_back(s);
  } else if (key == "workers") {
    spec.workers = count();
  } else if (key == "out") {
    spec.out = value;
  } else if (key == "methods") {
    spec.methods.clear();
    for (const auto& m : split_list(value)) spec.methods.push_back(parse_method(m, spec));
  } else if (key == "mtry") {
    cfg.mtry = count();
  } else if (key == "total_nets") {
    cfg.total_nets = count();
  } else if (key == "max_it") {
    cfg.max_it = count();
  } else if (key == "feature_sampling") {
    cfg.use_feature_sampling = parse_bool(key, value);
  } else if (key == "aggregation") {
    if (value == "mean") {
      cfg.aggregation = Aggregation::Mean;
    } else if (value == "majority_vote") {
      cfg.aggregation = Aggregation::MajorityVote;
    } else {
      throw ConfigError("aggregation must be mean or majority_vote");
    }
  } else if (key == "baseline.max_it") {
    spec.baseline_dbn.max_it = count();
  } else if (key == "oversample.x") {
    spec.oversample_x = count();
  } else if (key == "smote.k") {
    spec.smote_k = count();
  } else if (key == "smote.multiplier") {
    spec.smote_multiplier = count();
  } else if (key.rfind("dbn.", 0) == 0) {
    // Shared by the ensembles and the baselines, except max_it.
    for (DbnHyperparams* h : {&cfg.dbn, &spec.baseline_dbn}) {
      if (key == "dbn.hidden") {
        h->hidden_sizes = parse_count_list(value);
      } else if (key == "dbn.cd_k") {
        h->cd_k = count();
      } else if (key == "dbn.pretrain_epochs") {
        h->pretrain_epochs = count();
      } else if (key == "dbn.pretrain_lr") {
        h->pretrain_lr = real();
      } else if (key == "dbn.finetune_lr") {
        h->finetune_lr = real();
      } else if (key == "dbn.batch_size") {
        h->batch_size = count();
      } else {
        throw ConfigError("unknown spec key '" + key + "'");
      }
    }
  } else if (key == "sweep.parameter") {
    if (value != "mtry" && value != "max_it" && value != "total_nets") {
      throw ConfigError("sweep.parameter must be mtry, max_it or total_nets");
    }
    spec.sweep_parameter = value;
  } else if (key == "sweep.values") {
    spec.sweep_values = parse_count_list(value);
  } else {
    throw ConfigError("unknown spec key '" + key + "'");
  }
  refresh_methods(spec);
}

ExperimentSpec parse_spec(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos) {
      throw ConfigError("spec line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_setting(spec, line.substr(0, sep), line.substr(sep + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("spec line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open spec file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

void validate(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw ConfigError("at least one method is required");
  if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(spec.split > 0.0 && spec.split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  if (spec.workers < 1) throw ConfigError("workers must be at least 1");
  if (spec.data.kind == DataSource::Kind::Csv) {
    if (spec.data.path.empty()) throw ConfigError("data.path is required for CSV data");
    if (spec.data.schema.label_column.empty()) throw ConfigError("label column is required for CSV data");
  }
  DbnHyperparams b = spec.baseline_dbn;
  b.validate();
  spec.deepbalance.dbn.validate();
  if (spec.deepbalance.total_nets < 1 || spec.deepbalance.max_it < 1 || spec.deepbalance.mtry < 1) {
    throw ConfigError("mtry, total_nets and max_it must be at least 1");
  }
}

Dataset load_dataset(const DataSource& data) {
  Dataset ds = data.kind == DataSource::Kind::Synthetic
                   ? generate_synthetic(data.n_majority, data.n_minority, data.dims,
                                        data.separation, data.synth_seed)
                   : load_csv(data.path, data.schema);
  if (data.max_majority > 0 && ds.count_negative() > data.max_majority) {
    auto neg = ds.indices_of(0);
    RngStream rng(data.synth_seed, kSubsampleStream);
    rng.shuffle(neg);
    neg.resize(data.max_majority);
    auto keep = ds.indices_of(1);
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());
    ds = ds.subset(keep);
  }
  return ds;
}

CellResult run_cell(const ExperimentSpec& spec, const MethodSpec& method, const SplitResult& split,
                    std::uint64_t seed, bool keep_model) {
  CellResult cell;
  cell.metrics.method = method.label;
  cell.metrics.threshold = spec.threshold;
  cell.metrics.seed = seed;
  try {
    const auto start = std::chrono::steady_clock::now();
    EnsembleModel model;
    switch (method.kind) {
      case MethodSpec::Kind::DeepBalance: {
        TrainConfig cfg = spec.deepbalance;
        cfg.seed = seed;
        model = train_deepbalance(split.train, cfg, spec.workers);
        break;
      }
      case MethodSpec::Kind::AllFeatures: {
        TrainConfig cfg = spec.deepbalance;
        cfg.seed = seed;
        model = train_all_features_ensemble(split.train, cfg, spec.workers);
        break;
      }
      case MethodSpec::Kind::Baseline:
        model = train_baseline(split.train, method.resample, spec.baseline_dbn, seed);
        break;
    }
    cell.train_seconds = seconds_since(start);

    const auto scores = predict(model, split.test.features());
    cell.metrics = evaluate_scores(method.label, scores, split.test.labels(), spec.threshold, seed,
                                   cell.train_seconds);
    try {
      cell.roc = RocSeries{method.label, seed, roc_curve(scores, split.test.labels())};
    } catch (const UndefinedMetricError&) {
    }
    if (keep_model) cell.model = std::move(model);
  } catch (const std::exception& e) {
    cell.metrics.error = e.what();
  }
  return cell;
}

int cmd_train(const ExperimentSpec& spec, std::ostream& log) {
  validate(spec);
  const Dataset ds = load_dataset(spec.data);
  const std::uint64_t seed = spec.seeds.front();
  const auto split = stratified_split(ds, spec.split, seed);
  const auto& method = spec.methods.front();
  auto cell = run_cell(spec, method, split, seed, true);
  if (cell.metrics.failed()) throw TrainingError(*cell.metrics.error);

  const auto dir = ensure_dir(spec.out);
  save_ensemble(*cell.model, dir / "model.json");
  const std::vector<MetricsRow> rows{cell.metrics};
  write_metrics_csv(rows, dir / "metrics.csv");
  write_metrics_json(rows, dir / "metrics.json");
  if (cell.roc) {
    const std::vector<RocSeries> roc{*cell.roc};
    write_roc_csv(roc, dir / "roc.csv");
  }
  log << kMetricsHeader << '\n' << metrics_csv_line(cell.metrics) << '\n';
  return kExitOk;
}

int cmd_benchmark(const ExperimentSpec& spec, std::ostream& log) {
  validate(spec);
  if (spec.methods.size() < 2) throw ConfigError("benchmark needs at least two methods");
  const Dataset ds = load_dataset(spec.data);
  std::vector<MetricsRow> rows;
  std::vector<RocSeries> rocs;
  for (std::uint64_t seed : spec.seeds) {
    const auto split = stratified_split(ds, spec.split, seed);
    for (const auto& method : spec.methods) {
      auto cell = run_cell(spec, method, split, seed, false);
      log << metrics_csv_line(cell.metrics);
      if (cell.metrics.failed()) log << "  # failed: " << *cell.metrics.error;
      log << '\n';
      if (cell.roc) rocs.push_back(std::move(*cell.roc));
      rows.push_back(std::move(cell.metrics));
    }
  }
  const auto dir = ensure_dir(spec.out);
  write_metrics_csv(rows, dir / "metrics.csv");
  write_metrics_json(rows, dir / "metrics.json");
  write_roc_csv(rocs, dir / "roc.csv");
  write_summary_csv(summarize(rows), dir / "summary.csv");

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.failed()) failures.push_back({{"method", r.method}, {"seed", r.seed}, {"error", *r.error}});
  }
  if (!failures.empty()) {
    log << nlohmann::json{{"status", "partial"}, {"failed", failures}}.dump() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.sweep_values.empty()) throw ConfigError("sweep.values is empty");
  const Dataset ds = load_dataset(spec.data);
  for (std::size_t v : spec.sweep_values) {
    if (v < 1) throw ConfigError("sweep values must be at least 1");
    if (spec.sweep_parameter == "mtry" && v > ds.cols()) {
      throw ConfigError("mtry sweep value " + std::to_string(v) + " exceeds the feature count");
    }
  }

  std::vector<SplitResult> splits;
  for (std::uint64_t seed : spec.seeds) splits.push_back(stratified_split(ds, spec.split, seed));

  MethodSpec method = parse_method("deepbalance", spec);
  std::vector<SweepRow> rows;
  for (std::size_t v : spec.sweep_values) {
    ExperimentSpec cell_spec = spec;
    auto& cfg = cell_spec.deepbalance;
    if (spec.sweep_parameter == "mtry") cfg.mtry = v;
    if (spec.sweep_parameter == "max_it") cfg.max_it = v;
    if (spec.sweep_parameter == "total_nets") cfg.total_nets = v;

    SweepRow row;
    row.value = v;
    std::vector<double> aucs;
    std::vector<double> times;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      const auto cell = run_cell(cell_spec, method, splits[s], spec.seeds[s], false);
      if (cell.metrics.failed() || !cell.metrics.auc) {
        ++row.failures;
        continue;
      }
      aucs.push_back(*cell.metrics.auc);
      times.push_back(cell.train_seconds);
    }
    row.mean_auc = mean(aucs);
    row.sd_auc = sample_sd(aucs);
    row.mean_train_seconds = mean(times);
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      const std::size_t h = times.size() / 2;
      row.median_train_seconds = times.size() % 2 ? times[h] : 0.5 * (times[h - 1] + times[h]);
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_sweep(const ExperimentSpec& spec, std::ostream& log) {
  const auto rows = run_sweep(spec);
  const auto dir = ensure_dir(spec.out);
  std::ofstream out(dir / "sweep.csv", std::ios::binary);
  if (!out) throw LoadError("cannot write '" + (dir / "sweep.csv").string() + "'");
  out << spec.sweep_parameter << ",mean_auc,sd_auc,mean_train_seconds\n";
  log << spec.sweep_parameter << ",mean_auc,sd_auc,mean_train_seconds\n";
  bool failed = false;
  for (const auto& r : rows) {
    std::ostringstream line;
    line << r.value << ',' << csv::format_double(r.mean_auc) << ',' << csv::format_double(r.sd_auc)
         << ',' << csv::format_double(r.mean_train_seconds);
    out << line.str() << '\n';
    log << line.str() << '\n';
    failed = failed || r.failures > 0;
  }
  return failed ? kExitPartial : kExitOk;
}

int cmd_gen_synth(const ExperimentSpec& spec, std::ostream& log) {
  const auto& d = spec.data;
  const Dataset ds = generate_synthetic(d.n_majority, d.n_minority, d.dims, d.separation, d.synth_seed);
  if (spec.out.has_parent_path()) ensure_dir(spec.out.parent_path());
  write_csv(ds, spec.out, "label");
  log << "wrote " << ds.rows() << " rows (" << ds.count_positive() << " positive) to "
      << spec.out.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const ExperimentSpec& spec, const std::filesystem::path& model_path,
                 std::ostream& log) {
  if (spec.data.kind != DataSource::Kind::Csv || spec.data.path.empty()) {
    throw ConfigError("evaluate needs a CSV data source (data.path or --data)");
  }
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [0, 1]");
  }
  const EnsembleModel model = load_ensemble(model_path);
  const Dataset ds = load_dataset(spec.data);

  // Align columns by name. Indicator columns for categorical levels absent
  // from this file are all zero.
  Matrix x(ds.rows(), model.feature_names.size());
  for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
    const auto& name = model.feature_names[j];
    const auto it = std::find(ds.feature_names().begin(), ds.feature_names().end(), name);
    if (it == ds.feature_names().end()) {
      if (name.find('=') != std::string::npos) continue;
      throw LoadError("evaluation data lacks model feature '" + name + "'");
    }
    const auto src = static_cast<std::size_t>(it - ds.feature_names().begin());
    for (std::size_t i = 0; i < ds.rows(); ++i) x(i, j) = ds.features()(i, src);
  }

  const auto scores = predict(model, x);
  const std::string method = model.members.size() == 1 && !model.config.use_feature_sampling
                                 ? method_name(model.config.resample)
                                 : "deepbalance";
  const auto row = evaluate_scores(method, scores, ds.labels(), spec.threshold, model.config.seed, 0.0);
  const auto dir = ensure_dir(spec.out);
  const std::vector<MetricsRow> rows{row};
  write_metrics_csv(rows, dir / "metrics.csv");
  write_metrics_json(rows, dir / "metrics.json");
  try {
    const std::vector<RocSeries> roc{{method, model.config.seed, roc_curve(scores, ds.labels())}};
    write_roc_csv(roc, dir / "roc.csv");
  } catch (const UndefinedMetricError&) {
  }
  std::ofstream sc(dir / "scores.csv", std::ios::binary);
  sc << "score,label\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sc << csv::format_double(scores[i]) << ',' << ds.labels()[i] << '\n';
  }
  log << kMetricsHeader << '\n' << metrics_csv_line(row) << '\n';
  return kExitOk;
}

int run_command(std::ostream& err, const std::function<int()>& body) {
  const auto report = [&](int code, const char* kind, const char* what) {
    err << nlohmann::json{{"status", "error"}, {"code", code}, {"kind", kind}, {"message", what}}.dump()
        << '\n';
    return code;
  };
  try {
    return body();
  } catch (const ConfigError& e) {
    return report(kExitUsage, "config", e.what());
  } catch (const LoadError& e) {
    return report(kExitInput, "input", e.what());
  } catch (const SplitError& e) {
    return report(kExitTraining, "split", e.what());
  } catch (const ResampleError& e) {
    return report(kExitTraining, "resample", e.what());
  } catch (const TrainingError& e) {
    return report(kExitTraining, "training", e.what());
  } catch (const UndefinedMetricError& e) {
    return report(kExitTraining, "metric", e.what());
  } catch (const std::exception& e) {
    return report(kExitInternal, "internal", e.what());
  }
}

}  // namespace deepbalance
