#include "deepbalance/serialize.hpp"

#include <fstream>
#include <sstream>

#include "deepbalance/errors.hpp"

namespace deepbalance {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "deepbalance-ensemble";

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

json dbn_to_json(const DbnModel& model) {
  json layers = json::array();
  for (const auto& layer : model.layers) {
    layers.push_back({
        {"visible", layer.visible_size()},
        {"hidden", layer.hidden_size()},
        {"weights", std::vector<double>(layer.weights.values().begin(), layer.weights.values().end())},
        {"visible_bias", layer.visible_bias},
        {"hidden_bias", layer.hidden_bias},
    });
  }
  return {
      {"layer_sizes", model.layer_sizes()},
      {"layers", std::move(layers)},
      {"output_weights", model.output_weights},
      {"output_bias", model.output_bias},
  };
}

DbnModel dbn_from_json(const json& j) {
  DbnModel model;
  for (const auto& l : j.at("layers")) {
    const auto visible = l.at("visible").get<std::size_t>();
    const auto hidden = l.at("hidden").get<std::size_t>();
    RbmLayer layer;
    try {
      layer.weights = Matrix(visible, hidden, doubles(l.at("weights")));
    } catch (const ContractViolation&) {
      throw LoadError("model: layer weight count does not match its shape");
    }
    layer.visible_bias = doubles(l.at("visible_bias"));
    layer.hidden_bias = doubles(l.at("hidden_bias"));
    model.layers.push_back(std::move(layer));
  }
  model.output_weights = doubles(j.at("output_weights"));
  model.output_bias = j.at("output_bias").get<double>();
  try {
    model.check_shapes();
  } catch (const ContractViolation& e) {
    throw LoadError(std::string("model: ") + e.what());
  }
  return model;
}

json hyperparams_to_json(const DbnHyperparams& h) {
  return {
      {"hidden_sizes", h.hidden_sizes}, {"cd_k", h.cd_k},
      {"pretrain_epochs", h.pretrain_epochs}, {"pretrain_lr", h.pretrain_lr},
      {"finetune_lr", h.finetune_lr}, {"batch_size", h.batch_size},
      {"max_it", h.max_it},
  };
}

DbnHyperparams hyperparams_from_json(const json& j) {
  DbnHyperparams h;
  h.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
  h.cd_k = j.at("cd_k").get<std::size_t>();
  h.pretrain_epochs = j.at("pretrain_epochs").get<std::size_t>();
  h.pretrain_lr = j.at("pretrain_lr").get<double>();
  h.finetune_lr = j.at("finetune_lr").get<double>();
  h.batch_size = j.at("batch_size").get<std::size_t>();
  h.max_it = j.at("max_it").get<std::size_t>();
  return h;
}

json resample_to_json(const ResampleMethod& method) {
  json j{{"method", method_name(method)}};
  if (const auto* o = std::get_if<Oversample>(&method)) j["target_count"] = o->target_count;
  if (const auto* s = std::get_if<Smote>(&method)) {
    j["k_neighbors"] = s->k_neighbors;
    j["amount_multiplier"] = s->amount_multiplier;
  }
  return j;
}

ResampleMethod resample_from_json(const json& j) {
  const auto name = j.at("method").get<std::string>();
  if (name == "balanced_bootstrap") return BalancedBootstrap{};
  if (name == "undersample") return Undersample{};
  if (name == "oversample") return Oversample{j.at("target_count").get<std::size_t>()};
  if (name == "smote") {
    return Smote{j.at("k_neighbors").get<std::size_t>(), j.at("amount_multiplier").get<std::size_t>()};
  }
  if (name == "none") return NoResampling{};
  throw LoadError("model: unknown resample method '" + name + "'");
}

json config_to_json(const TrainConfig& c) {
  return {
      {"mtry", c.mtry},
      {"total_nets", c.total_nets},
      {"max_it", c.max_it},
      {"seed", c.seed},
      {"use_feature_sampling", c.use_feature_sampling},
      {"aggregation", c.aggregation == Aggregation::Mean ? "mean" : "majority_vote"},
      {"resample", resample_to_json(c.resample)},
      {"dbn", hyperparams_to_json(c.dbn)},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.mtry = j.at("mtry").get<std::size_t>();
  c.total_nets = j.at("total_nets").get<std::size_t>();
  c.max_it = j.at("max_it").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.use_feature_sampling = j.at("use_feature_sampling").get<bool>();
  const auto agg = j.at("aggregation").get<std::string>();
  if (agg == "mean") {
    c.aggregation = Aggregation::Mean;
  } else if (agg == "majority_vote") {
    c.aggregation = Aggregation::MajorityVote;
  } else {
    throw LoadError("model: unknown aggregation '" + agg + "'");
  }
  c.resample = resample_from_json(j.at("resample"));
  c.dbn = hyperparams_from_json(j.at("dbn"));
  return c;
}

json ensemble_to_json(const EnsembleModel& model) {
  json members = json::array();
  for (const auto& m : model.members) {
    members.push_back({
        {"feature_indices", m.feature_indices},
        {"standardizer", {{"mean", m.standardizer.mean}, {"stddev", m.standardizer.stddev}}},
        {"dbn", dbn_to_json(m.model)},
    });
  }
  return {
      {"format", kFormatTag},
      {"version", kModelFormatVersion},
      {"feature_names", model.feature_names},
      {"config", config_to_json(model.config)},
      {"members", std::move(members)},
  };
}

EnsembleModel ensemble_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormatTag) {
      throw LoadError("model: not a deepbalance ensemble bundle");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw LoadError("model: unsupported format version " + std::to_string(version));
    }
    EnsembleModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.config = config_from_json(j.at("config"));
    for (const auto& m : j.at("members")) {
      EnsembleMember member;
      member.feature_indices = m.at("feature_indices").get<std::vector<std::size_t>>();
      member.standardizer.mean = doubles(m.at("standardizer").at("mean"));
      member.standardizer.stddev = doubles(m.at("standardizer").at("stddev"));
      member.model = dbn_from_json(m.at("dbn"));
      for (std::size_t f : member.feature_indices) {
        if (f >= model.feature_names.size()) throw LoadError("model: feature index out of range");
      }
      if (member.standardizer.mean.size() != member.feature_indices.size() ||
          member.standardizer.stddev.size() != member.feature_indices.size() ||
          member.model.input_size() != member.feature_indices.size()) {
        throw LoadError("model: member shapes disagree with its feature subset");
      }
      model.members.push_back(std::move(member));
    }
    return model;
  } catch (const json::exception& e) {
    throw LoadError(std::string("model: malformed JSON bundle: ") + e.what());
  }
}

std::string serialize_ensemble(const EnsembleModel& model) {
  return ensemble_to_json(model).dump(1) + "\n";
}

EnsembleModel deserialize_ensemble(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("model: invalid JSON: ") + e.what());
  }
  return ensemble_from_json(j);
}

void save_ensemble(const EnsembleModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write model file '" + path.string() + "'");
  out << serialize_ensemble(model);
  if (!out) throw LoadError("error while writing '" + path.string() + "'");
}

EnsembleModel load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_ensemble(buf.str());
}

}  // namespace deepbalance
