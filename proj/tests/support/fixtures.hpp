#pragma once

#include <string>
#include <vector>

#include "hyperloc/corpus.hpp"
#include "hyperloc/modeler.hpp"
#include "hyperloc/textproc.hpp"

namespace fixtures {

inline const hyperloc::StopwordSet& stopwords() {
  static const hyperloc::StopwordSet set = hyperloc::StopwordSet::load(HYPERLOC_STOPWORDS_FILE);
  return set;
}

inline hyperloc::ContentItem item(std::string id, std::string user, std::string text, double lat,
                                  double lon, std::string source = "iphone",
                                  std::string timestamp = "2014-01-01T12:00:00Z") {
  hyperloc::ContentItem it;
  it.id = std::move(id);
  it.user_id = std::move(user);
  it.text = std::move(text);
  it.location = hyperloc::GeoPoint{lat, lon};
  it.source = std::move(source);
  it.timestamp = *hyperloc::parse_instant(timestamp);
  return it;
}

inline hyperloc::ContentItem unlocated_item(std::string id, std::string user, std::string text,
                                            std::string source = "iphone",
                                            std::string timestamp = "2014-06-01T12:00:00Z") {
  hyperloc::ContentItem it;
  it.id = std::move(id);
  it.user_id = std::move(user);
  it.text = std::move(text);
  it.source = std::move(source);
  it.timestamp = *hyperloc::parse_instant(timestamp);
  return it;
}

// Hand-built registry model for locator/evaluator tests.
inline hyperloc::GeoModel model(const std::string& key, bool geo_specific,
                                hyperloc::GeoPoint center, std::uint64_t support,
                                double var = 0.25, double core_area = 1.0) {
  hyperloc::GeoModel m;
  m.gram = hyperloc::gram_from_key(key);
  m.geo_specific = geo_specific;
  m.center = center;
  m.cov = {var, var, 0.0};
  m.support_total = support;
  m.support_final = support;
  m.iterations_used = 1;
  m.core_area_km2 = core_area;
  return m;
}

inline hyperloc::ModelRegistry registry(std::vector<hyperloc::GeoModel> models,
                                        hyperloc::GeoPoint origin = {40.75, -73.98}) {
  hyperloc::ModelRegistry reg;
  reg.origin = origin;
  for (auto& m : models) {
    std::string key = hyperloc::gram_key(m.gram);
    reg.models.emplace(std::move(key), std::move(m));
  }
  return reg;
}

}  // namespace fixtures
