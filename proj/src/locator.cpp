#include "hyperloc/locator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <istream>
#include <thread>

#include "hyperloc/errors.hpp"

namespace hyperloc {

std::string_view to_string(PredictionStatus status) {
  switch (status) {
    case PredictionStatus::predicted: return "predicted";
    case PredictionStatus::no_geo_ngram: return "no_geo_ngram";
    case PredictionStatus::conflicting_ngrams: return "conflicting_ngrams";
  }
  return "unknown";
}

std::optional<PredictionStatus> prediction_status_from_name(std::string_view name) {
  if (name == "predicted") return PredictionStatus::predicted;
  if (name == "no_geo_ngram") return PredictionStatus::no_geo_ngram;
  if (name == "conflicting_ngrams") return PredictionStatus::conflicting_ngrams;
  return std::nullopt;
}

std::vector<Gram> maximal_geo_grams(const std::vector<std::string>& tokens,
                                    const ModelRegistry& registry) {
  const std::size_t max_len = std::min(registry.max_gram_len(), tokens.size());

  std::vector<Gram> found;
  std::vector<std::string> found_keys;
  for (std::size_t n = 1; n <= max_len; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      Gram gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
      std::string key = gram_key(gram);
      if (std::find(found_keys.begin(), found_keys.end(), key) != found_keys.end()) continue;
      const auto it = registry.models.find(key);
      if (it == registry.models.end() || !it->second.geo_specific) continue;
      found_keys.push_back(std::move(key));
      found.push_back(std::move(gram));
    }
  }

  // Keep only grams that are not contained in another candidate.
  std::vector<Gram> maximal;
  for (const auto& gram : found) {
    bool subsumed = false;
    for (const auto& other : found) {
      if (other.size() > gram.size() && contains_gram(other, gram)) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) maximal.push_back(gram);
  }
  return maximal;
}

namespace {

// "Most common" candidate: largest training support, ties going to the
// longer gram, then the lexicographically smaller one.
const Gram* pick_most_common(const std::vector<Gram>& candidates, const ModelRegistry& registry) {
  const Gram* best = nullptr;
  std::uint64_t best_support = 0;
  for (const auto& gram : candidates) {
    const auto& model = registry.models.at(gram_key(gram));
    if (!best) {
      best = &gram;
      best_support = model.support_total;
      continue;
    }
    if (model.support_total != best_support) {
      if (model.support_total > best_support) {
        best = &gram;
        best_support = model.support_total;
      }
      continue;
    }
    if (gram.size() != best->size()) {
      if (gram.size() > best->size()) best = &gram;
      continue;
    }
    if (gram < *best) best = &gram;
  }
  return best;
}

}  // namespace

Prediction predict(const ContentItem& item, const ModelRegistry& registry,
                   const StopwordSet& stopwords, double adjacency_km) {
  Prediction pred;
  pred.item_id = item.id;

  const auto tokens = tokenize_item(item, stopwords);
  pred.candidate_grams = maximal_geo_grams(tokens, registry);

  if (pred.candidate_grams.empty()) {
    pred.status = PredictionStatus::no_geo_ngram;
    return pred;
  }

  if (pred.candidate_grams.size() > 1) {
    std::vector<GeoPoint> centers;
    for (const auto& gram : pred.candidate_grams)
      centers.push_back(registry.models.at(gram_key(gram)).center);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      for (std::size_t j = i + 1; j < centers.size(); ++j) {
        if (haversine_km(centers[i], centers[j]) > adjacency_km) {
          pred.status = PredictionStatus::conflicting_ngrams;
          return pred;
        }
      }
    }
  }

  const Gram* chosen = pick_most_common(pred.candidate_grams, registry);
  const GeoModel& model = registry.models.at(gram_key(*chosen));
  pred.status = PredictionStatus::predicted;
  pred.location = model.center;
  pred.chosen_gram = *chosen;
  pred.chosen_core_area_km2 = model.core_area_km2;
  return pred;
}

std::vector<Prediction> predict_batch(const std::vector<ContentItem>& items,
                                      const ModelRegistry& registry,
                                      const StopwordSet& stopwords, double adjacency_km,
                                      unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<Prediction> predictions(items.size());
  if (threads <= 1 || items.size() < 2 * threads) {
    for (std::size_t i = 0; i < items.size(); ++i)
      predictions[i] = predict(items[i], registry, stopwords, adjacency_km);
    return predictions;
  }

  std::vector<std::thread> workers;
  const std::size_t chunk = (items.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(items.size(), begin + chunk);
      for (std::size_t i = begin; i < end; ++i)
        predictions[i] = predict(items[i], registry, stopwords, adjacency_km);
    });
  }
  for (auto& w : workers) w.join();
  return predictions;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_predictions(std::ostream& out, std::span<const Prediction> predictions) {
  out << "item_id\tstatus\tlat\tlon\tgram\tcore_area_km2\n";
  for (const auto& p : predictions) {
    out << p.item_id << '\t' << to_string(p.status) << '\t';
    if (p.location) {
      out << fmt_double(p.location->lat) << '\t' << fmt_double(p.location->lon) << '\t'
          << gram_key(p.chosen_gram) << '\t' << fmt_double(p.chosen_core_area_km2);
    } else {
      out << "\t\t\t";
    }
    out << '\n';
  }
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> predictions;
  std::string line;
  if (!std::getline(in, line)) throw parse_error("predictions: missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 6)
      throw parse_error("predictions line " + std::to_string(line_no) + ": expected 6 fields");

    Prediction p;
    p.item_id = fields[0];
    const auto status = prediction_status_from_name(fields[1]);
    if (!status)
      throw parse_error("predictions line " + std::to_string(line_no) + ": bad status '" +
                        fields[1] + "'");
    p.status = *status;
    if (p.status == PredictionStatus::predicted) {
      try {
        p.location = GeoPoint{std::stod(fields[2]), std::stod(fields[3])};
        p.chosen_gram = gram_from_key(fields[4]);
        p.chosen_core_area_km2 = std::stod(fields[5]);
      } catch (const std::exception&) {
        throw parse_error("predictions line " + std::to_string(line_no) + ": bad numeric field");
      }
    }
    predictions.push_back(std::move(p));
  }
  return predictions;
}

}  // namespace hyperloc
