#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "hyperloc/geomath.hpp"
#include "hyperloc/textproc.hpp"

namespace hyperloc {

struct ModelParams {
  double max_area_km2 = 4.0;       // largest core-ellipse area accepted
  double min_ratio = 0.8;          // smallest retained fraction of the gram's items
  int max_iterations = 100;        // trimming-iteration limit
  double mahalanobis_radius = 2.0; // core-ellipse scale
};

// Throws config_error on out-of-range values.
void validate(const ModelParams& params);

struct GeoModel {
  Gram gram;
  bool geo_specific = false;
  GeoPoint center;                  // unprojected mean of the final Gaussian
  Cov2 cov;                         // km^2, in the registry's projection frame
  std::uint64_t support_total = 0;  // items containing the gram
  std::uint64_t support_final = 0;  // items retained at termination
  int iterations_used = 0;          // Gaussian fits performed
  double core_area_km2 = 0.0;       // area of the final core ellipse

  // The model's Gaussian expressed in a projection frame (normally the
  // registry's own origin).
  Gaussian2D frame_gaussian(const Projection& proj) const;
};

// One full run of the iterative trimming procedure for a single gram:
// check the retained ratio, fit, accept if the core ellipse is small enough,
// otherwise drop points outside the ellipse and repeat up to the iteration
// limit. A round that removes nothing ends the run as not geo-specific.
// Requires >= 2 locations (throws std::invalid_argument).
GeoModel localize_ngram(const NGramStats& stats, const ModelParams& params,
                        const Projection& proj);

struct ModelRegistry {
  ModelParams params;
  GeoPoint origin;                         // shared projection origin
  std::map<std::string, GeoModel> models;  // keyed by gram_key

  std::size_t geo_specific_count() const;
  std::size_t max_gram_len() const;
};

// localize_ngram over every candidate. Grams are processed in key order and
// the work may be sharded across threads; the result does not depend on the
// thread count.
ModelRegistry build_models(const NGramIndex& index, const ModelParams& params,
                           const GeoPoint& origin, unsigned threads = 1);

// Versioned text format, floats serialized with 17 significant digits so
// load(save(r)) reproduces every field bit-exactly.
void save_registry(const ModelRegistry& registry, std::ostream& out);
void save_registry(const ModelRegistry& registry, const std::string& path);
ModelRegistry load_registry(std::istream& in);
ModelRegistry load_registry(const std::string& path);

}  // namespace hyperloc
