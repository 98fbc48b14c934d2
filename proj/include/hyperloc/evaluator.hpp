#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperloc/locator.hpp"

namespace hyperloc {

// Haversine distance between the estimate and the true location.
// Throws std::invalid_argument on an abstained prediction.
double prediction_error_km(const Prediction& prediction, const GeoPoint& true_location);

// 1 when error_km <= delta_km, 1/error_km otherwise.
double accuracy(double error_km, double delta_km);

// Fraction of located items whose true location falls inside the chosen
// model's core ellipse, judged with the registry's Mahalanobis radius.
// Items without a known truth are excluded; absent (nullopt) when nothing
// qualifies -- an undefined precision is not zero.
std::optional<double> precision(std::span<const Prediction> predictions,
                                std::span<const ContentItem> test_items,
                                const ModelRegistry& registry);

// Located fraction of the whole test set. Throws config_error when empty.
double coverage(std::span<const Prediction> predictions);

// Harmonic mean of precision and coverage; 0 when both are 0.
double f_score(double precision_value, double coverage_value);

inline constexpr std::array<double, 5> kErrorQuantiles = {0.10, 0.25, 0.50, 0.75, 0.90};

struct ErrorStats {
  double mean_km = 0.0;
  double median_km = 0.0;
  std::array<double, 5> quantiles_km{};  // at kErrorQuantiles
  double mean_accuracy = 0.0;            // accuracy(error, delta) averaged
};

struct EvalReport {
  std::string train_source;
  std::string test_source;
  ModelParams params;
  double delta_km = 1.0;
  std::size_t n_test = 0;
  std::size_t n_predicted = 0;
  double coverage = 0.0;
  std::optional<double> precision;  // absent when no located item has a truth
  std::optional<ErrorStats> errors;
  double f_score = 0.0;
};

struct EvalOptions {
  IndexParams index;
  double delta_km = 1.0;
  double adjacency_km = 0.5;
  unsigned threads = 1;
};

// Full pipeline for one (train, test, params) cell: index and model the
// training items, predict the test items, aggregate the metrics. Floating
// aggregation uses pairwise summation over the test order, so parallel and
// serial evaluation agree.
EvalReport evaluate(const std::vector<ContentItem>& train, const std::vector<ContentItem>& test,
                    const ModelParams& params, const StopwordSet& stopwords,
                    const EvalOptions& opts = {}, std::string train_source = "",
                    std::string test_source = "");

enum class SweepAxis { min_ratio, max_area };
std::optional<SweepAxis> sweep_axis_from_name(std::string_view name);

// One report per grid value; models are rebuilt for every value.
std::vector<EvalReport> sweep(const std::vector<ContentItem>& train,
                              const std::vector<ContentItem>& test, SweepAxis axis,
                              std::span<const double> grid, const ModelParams& fixed,
                              const StopwordSet& stopwords, const EvalOptions& opts = {},
                              std::string train_source = "", std::string test_source = "");

struct SourceCorpus {
  std::string tag;
  std::vector<ContentItem> items;
};

// Train on each source in turn, always testing on the same test corpus.
std::vector<EvalReport> cross_model(std::span<const SourceCorpus> trains,
                                    const SourceCorpus& test, const ModelParams& params,
                                    const StopwordSet& stopwords, const EvalOptions& opts = {});

struct GravityRecord {
  Gram gram;
  std::string source;
  std::uint64_t support_total = 0;
  double mean_dispersion_km = 0.0;  // mean distance, training locations -> model center
};

// Dispersion of each geo-specific gram's full training location set around
// its final model center. top_m > 0 keeps only the most supported grams
// (records sorted by support descending, then gram).
std::vector<GravityRecord> gravity(const ModelRegistry& registry, const NGramIndex& index,
                                   const std::string& source, std::size_t top_m = 0);

struct GravitySource {
  std::string tag;
  const ModelRegistry* registry = nullptr;
  const NGramIndex* index = nullptr;
};

// Cross-source comparison: the union of each source's top_m geo-specific
// grams, with one record per (gram, source) where the gram has a geo-specific
// model in that source; absent grams are simply omitted for that source.
std::vector<GravityRecord> gravity(std::span<const GravitySource> sources, std::size_t top_m);

struct BoundingBox {
  double lat_min = 0.0, lon_min = 0.0;
  double lat_max = 0.0, lon_max = 0.0;

  bool valid() const;
  bool contains(const GeoPoint& p) const;  // boundary inclusive
};

struct HeatmapGrid {
  BoundingBox bbox;
  double cell_km = 0.0;
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint64_t> counts;  // row-major, row 0 = northern edge
  std::uint64_t overflow = 0;         // locations outside the bbox

  std::uint64_t at(std::size_t row, std::size_t col) const;
  std::uint64_t total() const;  // in-grid + overflow
};

// Counts per cell of a regular projected grid over the bbox. Locations
// outside the bbox land in the overflow bucket.
HeatmapGrid heatmap_grid(std::span<const GeoPoint> locations, const BoundingBox& bbox,
                         double cell_km);

// Seeded uniform subsample (order preserved) so two sets can be compared at
// equal size.
std::vector<GeoPoint> sample_locations(std::span<const GeoPoint> locations, std::size_t n,
                                       std::uint64_t seed);

void write_heatmap(std::ostream& out, const HeatmapGrid& grid);
void write_reports(std::ostream& out, std::span<const EvalReport> reports);
void write_gravity(std::ostream& out, std::span<const GravityRecord> records);

// Headline results reported for the original 14.5M-tweet New York corpus at
// the default parameters. That corpus is not redistributable, so these are
// reference documentation, never test oracles.
namespace reported {
inline constexpr double kTwAllMeanErrorKm = 1.6;
inline constexpr double kTwAllPrecision = 0.798;
inline constexpr double kTwAllCoverage = 0.063;
inline constexpr double kTwAllFScore = 0.12;
// Coverage when testing on TW-iPhone, by training source.
inline constexpr double kIphoneTestCoverageTrainIphone = 0.003;
inline constexpr double kIphoneTestCoverageTrainAll = 0.013;
inline constexpr double kIphoneTestCoverageTrainFoursquare = 0.064;
inline constexpr double kIphoneTestCoverageTrainInstagram = 0.051;
// Coverage when testing on TW-Instagram, by training source.
inline constexpr double kInstagramTestCoverageTrainAll = 0.381;
inline constexpr double kInstagramTestCoverageTrainFoursquare = 0.472;
inline constexpr double kInstagramTestCoverageTrainInstagram = 0.542;
inline constexpr double kInstagramTestCoverageTrainAndroid = 0.038;
inline constexpr double kInstagramTestCoverageTrainIphone = 0.046;
// Dispersion of "NYCC New York" around its model center, per source.
inline constexpr double kNyccDispersionIphoneKm = 1.14;
inline constexpr double kNyccDispersionInstagramKm = 0.015;
}  // namespace reported

}  // namespace hyperloc
