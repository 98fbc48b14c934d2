#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperloc/modeler.hpp"

namespace hyperloc {

enum class PredictionStatus {
  predicted,
  no_geo_ngram,        // the item contains no geo-specific gram
  conflicting_ngrams,  // multiple maximal grams with centers too far apart
};

std::string_view to_string(PredictionStatus status);
std::optional<PredictionStatus> prediction_status_from_name(std::string_view name);

struct Prediction {
  std::string item_id;
  PredictionStatus status = PredictionStatus::no_geo_ngram;
  std::optional<GeoPoint> location;  // set iff status == predicted
  Gram chosen_gram;                  // empty unless predicted
  double chosen_core_area_km2 = 0.0;
  std::vector<Gram> candidate_grams;  // the maximal geo-specific grams found
};

// All geo-specific grams contained in the tokens, minus any gram that is a
// contiguous subsequence of another candidate ("New York Public" gives way
// to "New York Public Library").
std::vector<Gram> maximal_geo_grams(const std::vector<std::string>& tokens,
                                    const ModelRegistry& registry);

// Assignment rules: no candidate -> abstain; one candidate -> its model
// center; several candidates whose centers are pairwise within adjacency_km
// -> the candidate with the largest training support (ties: longer gram,
// then lexicographically smaller); otherwise -> abstain as conflicting.
Prediction predict(const ContentItem& item, const ModelRegistry& registry,
                   const StopwordSet& stopwords, double adjacency_km = 0.5);

// Element-wise predict, order preserved; thread count never changes results.
std::vector<Prediction> predict_batch(const std::vector<ContentItem>& items,
                                      const ModelRegistry& registry,
                                      const StopwordSet& stopwords,
                                      double adjacency_km = 0.5, unsigned threads = 1);

// item_id, status, lat, lon, gram, core_area_km2; header row always written,
// location fields empty on abstentions.
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);
std::vector<Prediction> read_predictions(std::istream& in);

}  // namespace hyperloc
