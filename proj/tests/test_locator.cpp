#include <sstream>

#include "doctest.h"
#include "hyperloc/errors.hpp"
#include "hyperloc/locator.hpp"
#include "support/fixtures.hpp"

using namespace hyperloc;

namespace {

// Registry around the "New York Public Library" phrase: every sub-gram is
// geo-specific, centers a few dozen metres apart.
ModelRegistry nypl_registry() {
  const GeoPoint lib{40.7532, -73.9822};
  std::vector<GeoModel> models;
  models.push_back(fixtures::model("new york public", true, {lib.lat, lib.lon}, 150));
  models.push_back(fixtures::model("york public library", true, {lib.lat + 0.0002, lib.lon}, 90));
  models.push_back(fixtures::model("new york", true, {lib.lat, lib.lon + 0.0002}, 400));
  models.push_back(fixtures::model("york public", true, {lib.lat, lib.lon - 0.0002}, 80));
  models.push_back(fixtures::model("public library", true, {lib.lat - 0.0002, lib.lon}, 120));
  models.push_back(fixtures::model("library", true, {lib.lat + 0.0001, lib.lon}, 300));
  return fixtures::registry(std::move(models));
}

}  // namespace

TEST_CASE("maximal_geo_grams drops grams subsumed by longer candidates") {
  const auto registry = nypl_registry();
  const auto& stop = fixtures::stopwords();
  const auto tokens = tokenize("Reading at the New York Public Library today", stop);

  const auto maximal = maximal_geo_grams(tokens, registry);
  REQUIRE(maximal.size() == 2);
  CHECK(std::find(maximal.begin(), maximal.end(), Gram{"new", "york", "public"}) != maximal.end());
  CHECK(std::find(maximal.begin(), maximal.end(), Gram{"york", "public", "library"}) !=
        maximal.end());
}

TEST_CASE("maximal_geo_grams with no geo-specific grams returns nothing") {
  const auto registry = nypl_registry();
  CHECK(maximal_geo_grams({"sunny", "afternoon"}, registry).empty());
  CHECK(maximal_geo_grams({}, registry).empty());
}

TEST_CASE("a lone geo-specific unigram is maximal") {
  const auto registry = fixtures::registry({
      fixtures::model("library", true, {40.7532, -73.9822}, 300),
  });
  const auto maximal = maximal_geo_grams({"quiet", "library", "corner"}, registry);
  REQUIRE(maximal.size() == 1);
  CHECK(maximal[0] == Gram{"library"});
}

TEST_CASE("non-geo-specific models never become candidates") {
  const auto registry = fixtures::registry({
      fixtures::model("weather", false, {40.75, -73.98}, 900),
  });
  const auto item = fixtures::item("t1", "u1", "weather again", 40.75, -73.98);
  const auto pred = predict(item, registry, fixtures::stopwords());
  CHECK(pred.status == PredictionStatus::no_geo_ngram);
  CHECK_FALSE(pred.location.has_value());
}

TEST_CASE("predict with a single gram lands on the model mean") {
  const GeoPoint center{40.7420528, -73.9876882};
  const auto registry = fixtures::registry({
      fixtures::model("madison square", true, center, 120),
  });
  const auto item = fixtures::item("t1", "u1", "Lunch at Madison Square!", 40.742, -73.988);
  const auto pred = predict(item, registry, fixtures::stopwords());

  CHECK(pred.status == PredictionStatus::predicted);
  REQUIRE(pred.location.has_value());
  CHECK(pred.location->lat == center.lat);
  CHECK(pred.location->lon == center.lon);
  CHECK(gram_key(pred.chosen_gram) == "madison square");
  CHECK(pred.candidate_grams.size() == 1);
}

TEST_CASE("adjacent candidates resolve to the most common gram") {
  // Two maximal grams ~0.1 km apart; supports 120 vs 40.
  const GeoPoint a{40.7500, -73.9800};
  const GeoPoint b{40.7509, -73.9800};  // ~0.1 km north
  const auto registry = fixtures::registry({
      fixtures::model("flatiron views", true, a, 120),
      fixtures::model("broadway crossing", true, b, 40),
  });
  const auto item =
      fixtures::item("t1", "u1", "flatiron views broadway crossing", 40.75, -73.98);
  const auto pred = predict(item, registry, fixtures::stopwords());

  CHECK(pred.status == PredictionStatus::predicted);
  CHECK(gram_key(pred.chosen_gram) == "flatiron views");
  CHECK(pred.location->lat == a.lat);
  CHECK(pred.candidate_grams.size() == 2);
}

TEST_CASE("distant candidates abstain as conflicting") {
  const GeoPoint a{40.7500, -73.9800};
  const GeoPoint b{40.7770, -73.9800};  // ~3 km north
  const auto registry = fixtures::registry({
      fixtures::model("uptown spot", true, a, 120),
      fixtures::model("downtown spot", true, b, 40),
  });
  const auto item = fixtures::item("t1", "u1", "uptown spot downtown spot", 40.76, -73.98);
  const auto pred = predict(item, registry, fixtures::stopwords());

  CHECK(pred.status == PredictionStatus::conflicting_ngrams);
  CHECK_FALSE(pred.location.has_value());
  CHECK(pred.chosen_gram.empty());
  CHECK(pred.candidate_grams.size() == 2);
}

TEST_CASE("the adjacency threshold is inclusive and configurable") {
  const GeoPoint a{40.7500, -73.9800};
  const GeoPoint b{40.7770, -73.9800};  // ~3 km
  const auto registry = fixtures::registry({
      fixtures::model("near dock", true, a, 10),
      fixtures::model("far pier", true, b, 20),
  });
  const auto item = fixtures::item("t1", "u1", "near dock far pier", 40.76, -73.98);
  const double d = haversine_km(a, b);

  CHECK(predict(item, registry, fixtures::stopwords(), d).status ==
        PredictionStatus::predicted);
  CHECK(predict(item, registry, fixtures::stopwords(), d * 0.999).status ==
        PredictionStatus::conflicting_ngrams);
}

TEST_CASE("support ties break to the longer gram, then lexicographic") {
  const GeoPoint spot{40.7500, -73.9800};
  SUBCASE("longer gram wins") {
    const auto registry = fixtures::registry({
        fixtures::model("pier", true, spot, 50),
        fixtures::model("east pavilion", true, {spot.lat, spot.lon + 0.0003}, 50),
    });
    const auto item = fixtures::item("t1", "u1", "east pavilion pier", 40.75, -73.98);
    const auto pred = predict(item, registry, fixtures::stopwords());
    CHECK(gram_key(pred.chosen_gram) == "east pavilion");
  }
  SUBCASE("equal length falls back to lexicographic order") {
    const auto registry = fixtures::registry({
        fixtures::model("west gate", true, spot, 50),
        fixtures::model("north gate", true, {spot.lat, spot.lon + 0.0003}, 50),
    });
    const auto item = fixtures::item("t1", "u1", "west gate north gate ok", 40.75, -73.98);
    const auto pred = predict(item, registry, fixtures::stopwords());
    CHECK(gram_key(pred.chosen_gram) == "north gate");
  }
  SUBCASE("distinct supports ignore the tie-break entirely") {
    const auto registry = fixtures::registry({
        fixtures::model("aaa", true, spot, 51),
        fixtures::model("zzz bbb", true, {spot.lat, spot.lon + 0.0003}, 50),
    });
    const auto item = fixtures::item("t1", "u1", "aaa zzz bbb", 40.75, -73.98);
    CHECK(gram_key(predict(item, registry, fixtures::stopwords()).chosen_gram) == "aaa");
  }
}

TEST_CASE("tweets without indexed grams abstain") {
  const auto registry = nypl_registry();
  const auto item = fixtures::item("t1", "u1", "nothing to see", 40.75, -73.98);
  const auto pred = predict(item, registry, fixtures::stopwords());
  CHECK(pred.status == PredictionStatus::no_geo_ngram);
  CHECK(pred.candidate_grams.empty());
}

TEST_CASE("predict_batch equals element-wise predict and preserves order") {
  const auto registry = nypl_registry();
  std::vector<ContentItem> items{
      fixtures::item("t1", "u1", "new york public library", 40.75, -73.98),
      fixtures::item("t2", "u2", "nothing here", 40.75, -73.98),
      fixtures::item("t3", "u3", "library", 40.75, -73.98),
  };

  CHECK(predict_batch({}, registry, fixtures::stopwords()).empty());

  const auto batch = predict_batch(items, registry, fixtures::stopwords());
  const auto batch4 = predict_batch(items, registry, fixtures::stopwords(), 0.5, 4);
  REQUIRE(batch.size() == 3);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto single = predict(items[i], registry, fixtures::stopwords());
    CHECK(batch[i].item_id == items[i].id);
    CHECK(batch[i].status == single.status);
    CHECK(batch[i].status == batch4[i].status);
    CHECK(batch[i].location.has_value() == single.location.has_value());
    if (single.location) {
      CHECK(batch[i].location->lat == single.location->lat);
      CHECK(batch[i].location->lon == single.location->lon);
    }
  }
  CHECK(batch[0].status == PredictionStatus::predicted);
  CHECK(batch[1].status == PredictionStatus::no_geo_ngram);
  CHECK(batch[2].status == PredictionStatus::predicted);
}

TEST_CASE("abstention soundness: a location is present iff predicted") {
  const auto registry = nypl_registry();
  const std::vector<ContentItem> items{
      fixtures::item("t1", "u1", "new york public library", 40.75, -73.98),
      fixtures::item("t2", "u2", "blank", 40.75, -73.98),
  };
  for (const auto& pred : predict_batch(items, registry, fixtures::stopwords())) {
    CHECK((pred.status == PredictionStatus::predicted) == pred.location.has_value());
    CHECK((pred.status == PredictionStatus::predicted) == !pred.chosen_gram.empty());
  }
}

TEST_CASE("predictions round-trip through the file format") {
  const auto registry = nypl_registry();
  const std::vector<ContentItem> items{
      fixtures::item("t1", "u1", "new york public library", 40.75, -73.98),
      fixtures::item("t2", "u2", "blank", 40.75, -73.98),
  };
  const auto preds = predict_batch(items, registry, fixtures::stopwords());

  std::ostringstream out;
  write_predictions(out, preds);
  std::istringstream in(out.str());
  const auto loaded = read_predictions(in);

  REQUIRE(loaded.size() == preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(loaded[i].item_id == preds[i].item_id);
    CHECK(loaded[i].status == preds[i].status);
    CHECK(loaded[i].location.has_value() == preds[i].location.has_value());
    if (preds[i].location) {
      CHECK(loaded[i].location->lat == preds[i].location->lat);
      CHECK(loaded[i].location->lon == preds[i].location->lon);
      CHECK(loaded[i].chosen_gram == preds[i].chosen_gram);
    }
  }

  std::istringstream junk("item_id\tstatus\tlat\tlon\tgram\tcore_area_km2\nt9\tbogus\t\t\t\t\n");
  CHECK_THROWS_AS(read_predictions(junk), parse_error);
}
