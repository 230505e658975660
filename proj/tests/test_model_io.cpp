#include <filesystem>

#include "doctest.h"
#include "drf/error.hpp"
#include "drf/model_io.hpp"

using namespace drf;

namespace {

ForestConfig config_for(Variant v, Routing routing = Routing::proximity) {
  ForestConfig c;
  c.tree.variant = v;
  c.tree.routing = routing;
  c.n_trees = 8;
  c.master_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("models round-trip losslessly") {
  const auto train = load_dataset(FIXTURE_DIR "/multiclass_train.csv");
  LoadOptions opts;
  opts.known_classes = train.class_names();
  const auto test = load_dataset(FIXTURE_DIR "/multiclass_test.csv", opts);
  for (auto v : kAllVariants) {
    for (auto routing : {Routing::proximity, Routing::bisector}) {
      CAPTURE(variant_name(v));
      const auto forest = train_forest(train, config_for(v, routing), 1);
      const auto text = serialize_model(forest);
      const auto loaded = deserialize_model(text);
      CHECK(serialize_model(loaded) == text);
      CHECK(loaded.class_names == forest.class_names);
      CHECK(loaded.feature_names == forest.feature_names);
      CHECK(loaded.config.tree.variant == v);
      for (std::size_t i = 0; i < test.rows(); ++i)
        CHECK(predict_forest(loaded, test.row(i)) == predict_forest(forest, test.row(i)));
    }
  }
}

TEST_CASE("document fields") {
  const auto d = load_dataset(FIXTURE_DIR "/sep.csv");
  auto c = config_for(Variant::mpdraf_p);
  c.tree.mtry = 2;
  const auto doc = model_to_json(train_forest(d, c, 1));
  CHECK(doc.at("format_version") == kModelFormatVersion);
  CHECK(doc.at("variant") == "mpdraf-p");
  CHECK(doc.at("config").at("mtry") == 2);
  CHECK(doc.at("config").at("n_trees") == 8);
  CHECK(doc.at("trees").size() == 8);
  CHECK(doc.at("class_names").size() == 2);
}

TEST_CASE("file save and load") {
  const auto d = load_dataset(FIXTURE_DIR "/iris.csv");
  const auto forest = train_forest(d, config_for(Variant::draf_pca), 1);
  const auto path = std::filesystem::temp_directory_path() / "drf_model_io_test.json";
  save_model(path, forest);
  CHECK(serialize_model(load_model(path)) == serialize_model(forest));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), ModelError);
  CHECK_THROWS_AS(save_model("/nonexistent-dir/model.json", forest), std::ios_base::failure);
}

TEST_CASE("malformed documents are rejected") {
  const auto d = load_dataset(FIXTURE_DIR "/iris.csv");
  const auto doc = model_to_json(train_forest(d, config_for(Variant::raf), 1));

  CHECK_THROWS_AS(deserialize_model("{not json"), ModelError);
  CHECK_THROWS_AS(deserialize_model("{}"), ModelError);

  auto bad = doc;
  bad["format_version"] = 99;
  CHECK_THROWS_AS(model_from_json(bad), ModelError);

  bad = doc;
  bad["variant"] = "bogus";
  CHECK_THROWS_AS(model_from_json(bad), ModelError);

  bad = doc;
  bad["trees"][0]["nodes"][0]["left"] = 0;
  CHECK_THROWS_AS(model_from_json(bad), ModelError);

  bad = doc;
  bad["trees"][0]["nodes"][0]["feature"] = 4;
  CHECK_THROWS_AS(model_from_json(bad), ModelError);

  bad = doc;
  bad["trees"].erase(0);
  CHECK_THROWS_AS(model_from_json(bad), ModelError);

  bad = doc;
  bad["config"]["routing"] = "sideways";
  CHECK_THROWS_AS(model_from_json(bad), ModelError);
}

TEST_CASE("routing and fallback names") {
  CHECK(parse_routing(routing_name(Routing::bisector)) == Routing::bisector);
  CHECK(parse_fallback(fallback_name(FallbackScope::subtree)) == FallbackScope::subtree);
  CHECK_THROWS_AS(parse_routing("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fallback("x"), std::invalid_argument);
}
