#include <doctest.h>

#include <filesystem>
#include <random>

#include "deepbalance/ensemble.hpp"
#include "deepbalance/errors.hpp"
#include "deepbalance/serialize.hpp"
#include "test_util.hpp"

using namespace deepbalance;

namespace {

EnsembleModel trained(ResampleMethod method = BalancedBootstrap{}) {
  std::mt19937_64 gen(9);
  const Dataset train = testing::random_dataset(20, 200, 6, gen);
  TrainConfig c;
  c.total_nets = 4;
  c.max_it = 2;
  c.mtry = 3;
  c.dbn.hidden_sizes = {5, 3};
  c.dbn.pretrain_epochs = 1;
  c.resample = method;
  return train_deepbalance(train, c);
}

}  // namespace

TEST_CASE("ensemble round trip is exact and byte-stable") {
  for (const ResampleMethod& method :
       {ResampleMethod{BalancedBootstrap{}}, ResampleMethod{Undersample{}},
        ResampleMethod{Oversample{300}}, ResampleMethod{Smote{3, 2}},
        ResampleMethod{NoResampling{}}}) {
    const auto e = trained(method);
    const std::string text = serialize_ensemble(e);
    const auto back = deserialize_ensemble(text);
    CHECK(back == e);
    CHECK(serialize_ensemble(back) == text);
    std::mt19937_64 gen(1);
    const Matrix x = testing::random_matrix(20, 6, gen, -3.0, 3.0);
    CHECK(predict(back, x) == predict(e, x));
  }
}

TEST_CASE("save and load through a file") {
  const auto e = trained();
  const auto path = std::filesystem::temp_directory_path() / "deepbalance_test_model.json";
  save_ensemble(e, path);
  CHECK(load_ensemble(path) == e);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_ensemble(path), LoadError);
}

TEST_CASE("malformed bundles are rejected") {
  const auto j = ensemble_to_json(trained());
  auto wrong_format = j;
  wrong_format["format"] = "something-else";
  CHECK_THROWS_AS(ensemble_from_json(wrong_format), LoadError);
  auto wrong_version = j;
  wrong_version["version"] = kModelFormatVersion + 1;
  CHECK_THROWS_AS(ensemble_from_json(wrong_version), LoadError);
  auto bad_index = j;
  bad_index["members"][0]["feature_indices"][0] = 99;
  CHECK_THROWS_AS(ensemble_from_json(bad_index), LoadError);
  auto short_weights = j;
  short_weights["members"][0]["dbn"]["layers"][0]["weights"].erase(0);
  CHECK_THROWS_AS(ensemble_from_json(short_weights), LoadError);
  CHECK_THROWS_AS(deserialize_ensemble("{not json"), LoadError);
  CHECK_THROWS_AS(deserialize_ensemble("[]"), LoadError);
}

TEST_CASE("dbn and config pieces round trip") {
  const auto e = trained();
  CHECK(dbn_from_json(dbn_to_json(e.members[0].model)) == e.members[0].model);
  CHECK(config_from_json(config_to_json(e.config)) == e.config);
  DbnHyperparams h;
  h.hidden_sizes = {7, 2, 2};
  h.cd_k = 3;
  h.finetune_lr = 0.125;
  CHECK(hyperparams_from_json(hyperparams_to_json(h)) == h);
}
