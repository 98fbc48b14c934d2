#include "hyperloc/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "hyperloc/errors.hpp"
#include "hyperloc/rng.hpp"

namespace hyperloc {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Linear-interpolation quantile over a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double prediction_error_km(const Prediction& prediction, const GeoPoint& true_location) {
  if (prediction.status != PredictionStatus::predicted || !prediction.location)
    throw std::invalid_argument("prediction_error_km: prediction for '" + prediction.item_id +
                                "' carries no location");
  return haversine_km(true_location, *prediction.location);
}

double accuracy(double error_km, double delta_km) {
  return error_km <= delta_km ? 1.0 : 1.0 / error_km;
}

std::optional<double> precision(std::span<const Prediction> predictions,
                                std::span<const ContentItem> test_items,
                                const ModelRegistry& registry) {
  if (predictions.size() != test_items.size())
    throw std::invalid_argument("precision: predictions and test items differ in length");

  const Projection proj(registry.origin);
  std::vector<double> hits;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Prediction& pred = predictions[i];
    if (pred.status != PredictionStatus::predicted || !test_items[i].location) continue;
    const GeoModel& model = registry.models.at(gram_key(pred.chosen_gram));
    const bool inside =
        ellipse_contains(model.frame_gaussian(proj), registry.params.mahalanobis_radius,
                         proj.project(*test_items[i].location));
    hits.push_back(inside ? 1.0 : 0.0);
  }
  if (hits.empty()) return std::nullopt;
  return pairwise_sum(hits) / static_cast<double>(hits.size());
}

double coverage(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw config_error("coverage: empty test set");
  std::size_t located = 0;
  for (const auto& p : predictions)
    if (p.status == PredictionStatus::predicted) ++located;
  return static_cast<double>(located) / static_cast<double>(predictions.size());
}

double f_score(double precision_value, double coverage_value) {
  const double denom = precision_value + coverage_value;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision_value * coverage_value / denom;
}

std::optional<SweepAxis> sweep_axis_from_name(std::string_view name) {
  if (name == "tau" || name == "min-ratio" || name == "ratio") return SweepAxis::min_ratio;
  if (name == "s" || name == "max-area" || name == "area") return SweepAxis::max_area;
  return std::nullopt;
}

EvalReport evaluate(const std::vector<ContentItem>& train, const std::vector<ContentItem>& test,
                    const ModelParams& params, const StopwordSet& stopwords,
                    const EvalOptions& opts, std::string train_source, std::string test_source) {
  const auto located_train = with_location(train);
  if (located_train.empty()) throw config_error("evaluate: no located training items");
  if (test.empty()) throw config_error("evaluate: empty test set");

  const auto index = build_index(located_train, stopwords, opts.index, opts.threads);
  const GeoPoint origin = corpus_centroid(located_train);
  const auto registry = build_models(index, params, origin, opts.threads);
  const auto predictions = predict_batch(test, registry, stopwords, opts.adjacency_km,
                                         opts.threads);

  EvalReport report;
  report.train_source = std::move(train_source);
  report.test_source = std::move(test_source);
  report.params = params;
  report.delta_km = opts.delta_km;
  report.n_test = test.size();
  for (const auto& p : predictions)
    if (p.status == PredictionStatus::predicted) ++report.n_predicted;
  report.coverage = coverage(predictions);
  report.precision = precision(predictions, test, registry);

  std::vector<double> errors;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].status != PredictionStatus::predicted || !test[i].location) continue;
    errors.push_back(prediction_error_km(predictions[i], *test[i].location));
  }
  if (!errors.empty()) {
    ErrorStats stats;
    stats.mean_km = pairwise_sum(errors) / static_cast<double>(errors.size());

    std::vector<double> accuracies;
    accuracies.reserve(errors.size());
    for (const double e : errors) accuracies.push_back(accuracy(e, opts.delta_km));
    stats.mean_accuracy = pairwise_sum(accuracies) / static_cast<double>(accuracies.size());

    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t q = 0; q < kErrorQuantiles.size(); ++q)
      stats.quantiles_km[q] = quantile_sorted(sorted, kErrorQuantiles[q]);
    stats.median_km = quantile_sorted(sorted, 0.5);
    report.errors = stats;
  }

  report.f_score = f_score(report.precision.value_or(0.0), report.coverage);
  return report;
}

std::vector<EvalReport> sweep(const std::vector<ContentItem>& train,
                              const std::vector<ContentItem>& test, SweepAxis axis,
                              std::span<const double> grid, const ModelParams& fixed,
                              const StopwordSet& stopwords, const EvalOptions& opts,
                              std::string train_source, std::string test_source) {
  if (grid.empty()) throw config_error("sweep: empty parameter grid");
  std::vector<EvalReport> reports;
  reports.reserve(grid.size());
  for (const double value : grid) {
    ModelParams params = fixed;
    if (axis == SweepAxis::min_ratio)
      params.min_ratio = value;
    else
      params.max_area_km2 = value;
    reports.push_back(evaluate(train, test, params, stopwords, opts, train_source, test_source));
  }
  return reports;
}

std::vector<EvalReport> cross_model(std::span<const SourceCorpus> trains,
                                    const SourceCorpus& test, const ModelParams& params,
                                    const StopwordSet& stopwords, const EvalOptions& opts) {
  if (trains.empty()) throw config_error("cross_model: no training sources");
  std::vector<EvalReport> reports;
  reports.reserve(trains.size());
  for (const auto& train : trains) {
    if (train.items.empty())
      throw config_error("cross_model: training source '" + train.tag + "' is empty");
    reports.push_back(evaluate(train.items, test.items, params, stopwords, opts, train.tag,
                               test.tag));
  }
  return reports;
}

namespace {

std::vector<const GeoModel*> top_geo_models(const ModelRegistry& registry, std::size_t top_m) {
  std::vector<const GeoModel*> models;
  for (const auto& [key, model] : registry.models)
    if (model.geo_specific) models.push_back(&model);
  std::stable_sort(models.begin(), models.end(), [](const GeoModel* a, const GeoModel* b) {
    if (a->support_total != b->support_total) return a->support_total > b->support_total;
    return a->gram < b->gram;
  });
  if (top_m > 0 && models.size() > top_m) models.resize(top_m);
  return models;
}

GravityRecord make_record(const GeoModel& model, const NGramStats& stats,
                          const std::string& source) {
  std::vector<double> distances;
  distances.reserve(stats.locations.size());
  for (const auto& loc : stats.locations) distances.push_back(haversine_km(loc, model.center));

  GravityRecord record;
  record.gram = model.gram;
  record.source = source;
  record.support_total = model.support_total;
  record.mean_dispersion_km =
      distances.empty() ? 0.0 : pairwise_sum(distances) / static_cast<double>(distances.size());
  return record;
}

}  // namespace

std::vector<GravityRecord> gravity(const ModelRegistry& registry, const NGramIndex& index,
                                   const std::string& source, std::size_t top_m) {
  std::vector<GravityRecord> records;
  for (const GeoModel* model : top_geo_models(registry, top_m)) {
    const auto it = index.find(gram_key(model->gram));
    if (it == index.end()) continue;
    records.push_back(make_record(*model, it->second, source));
  }
  return records;
}

std::vector<GravityRecord> gravity(std::span<const GravitySource> sources, std::size_t top_m) {
  // Union of each source's top grams, so the same gram can be compared
  // across sources even where it did not make another source's top list.
  std::vector<std::string> keys;
  for (const auto& src : sources) {
    for (const GeoModel* model : top_geo_models(*src.registry, top_m)) {
      std::string key = gram_key(model->gram);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(std::move(key));
    }
  }
  std::sort(keys.begin(), keys.end());

  std::vector<GravityRecord> records;
  for (const auto& key : keys) {
    for (const auto& src : sources) {
      const auto model_it = src.registry->models.find(key);
      if (model_it == src.registry->models.end() || !model_it->second.geo_specific) continue;
      const auto stats_it = src.index->find(key);
      if (stats_it == src.index->end()) continue;
      records.push_back(make_record(model_it->second, stats_it->second, src.tag));
    }
  }
  return records;
}

bool BoundingBox::valid() const {
  return valid_coordinates(lat_min, lon_min) && valid_coordinates(lat_max, lon_max) &&
         lat_min < lat_max && lon_min < lon_max;
}

bool BoundingBox::contains(const GeoPoint& p) const {
  return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
}

std::uint64_t HeatmapGrid::at(std::size_t row, std::size_t col) const {
  return counts[row * cols + col];
}

std::uint64_t HeatmapGrid::total() const {
  std::uint64_t n = overflow;
  for (const auto c : counts) n += c;
  return n;
}

HeatmapGrid heatmap_grid(std::span<const GeoPoint> locations, const BoundingBox& bbox,
                         double cell_km) {
  if (!bbox.valid()) throw config_error("heatmap_grid: invalid bounding box");
  if (!(cell_km > 0.0)) throw config_error("heatmap_grid: cell size must be positive");

  const Projection proj({0.5 * (bbox.lat_min + bbox.lat_max), 0.5 * (bbox.lon_min + bbox.lon_max)});
  const double x_min = proj.project({proj.origin().lat, bbox.lon_min}).x;
  const double x_max = proj.project({proj.origin().lat, bbox.lon_max}).x;
  const double y_min = proj.project({bbox.lat_min, proj.origin().lon}).y;
  const double y_max = proj.project({bbox.lat_max, proj.origin().lon}).y;

  // Tiny shave before ceil so an extent that is an exact multiple of the
  // cell size does not grow a sliver row/column.
  constexpr double kEdgeEpsKm = 1e-9;
  HeatmapGrid grid;
  grid.bbox = bbox;
  grid.cell_km = cell_km;
  grid.cols = static_cast<std::size_t>(std::ceil((x_max - x_min - kEdgeEpsKm) / cell_km));
  grid.rows = static_cast<std::size_t>(std::ceil((y_max - y_min - kEdgeEpsKm) / cell_km));
  if (grid.cols == 0) grid.cols = 1;
  if (grid.rows == 0) grid.rows = 1;
  grid.counts.assign(grid.rows * grid.cols, 0);

  for (const auto& loc : locations) {
    if (!bbox.contains(loc)) {
      ++grid.overflow;
      continue;
    }
    const ProjectedPoint p = proj.project(loc);
    auto col = static_cast<std::size_t>(std::max(0.0, (p.x - x_min) / cell_km));
    auto row = static_cast<std::size_t>(std::max(0.0, (y_max - p.y) / cell_km));
    if (col >= grid.cols) col = grid.cols - 1;
    if (row >= grid.rows) row = grid.rows - 1;
    ++grid.counts[row * grid.cols + col];
  }
  return grid;
}

std::vector<GeoPoint> sample_locations(std::span<const GeoPoint> locations, std::size_t n,
                                       std::uint64_t seed) {
  if (n >= locations.size()) return {locations.begin(), locations.end()};
  Rng rng(seed);
  const auto idx = sample_indices(locations.size(), n, rng);
  std::vector<GeoPoint> out;
  out.reserve(n);
  for (const std::size_t i : idx) out.push_back(locations[i]);
  return out;
}

void write_heatmap(std::ostream& out, const HeatmapGrid& grid) {
  out << "# hyperloc-heatmap\t1\n";
  out << "# bbox\t" << fmt_double(grid.bbox.lat_min) << '\t' << fmt_double(grid.bbox.lon_min)
      << '\t' << fmt_double(grid.bbox.lat_max) << '\t' << fmt_double(grid.bbox.lon_max) << '\n';
  out << "# cell_km\t" << fmt_double(grid.cell_km) << '\n';
  out << "# rows\t" << grid.rows << "\tcols\t" << grid.cols << '\n';
  out << "# overflow\t" << grid.overflow << '\n';
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) {
      if (c > 0) out << '\t';
      out << grid.at(r, c);
    }
    out << '\n';
  }
}

void write_reports(std::ostream& out, std::span<const EvalReport> reports) {
  out << "train_source\ttest_source\tmax_area_km2\tmin_ratio\tmax_iterations\t"
         "mahalanobis_radius\tdelta_km\tn_test\tn_predicted\tcoverage\tprecision\t"
         "mean_error_km\tmedian_error_km\tq10_km\tq25_km\tq50_km\tq75_km\tq90_km\t"
         "accuracy_at_delta\tf_score\n";
  for (const auto& r : reports) {
    out << r.train_source << '\t' << r.test_source << '\t' << fmt_double(r.params.max_area_km2)
        << '\t' << fmt_double(r.params.min_ratio) << '\t' << r.params.max_iterations << '\t'
        << fmt_double(r.params.mahalanobis_radius) << '\t' << fmt_double(r.delta_km) << '\t'
        << r.n_test << '\t' << r.n_predicted << '\t' << fmt_double(r.coverage) << '\t';
    if (r.precision) out << fmt_double(*r.precision);
    out << '\t';
    if (r.errors) {
      out << fmt_double(r.errors->mean_km) << '\t' << fmt_double(r.errors->median_km);
      for (const double q : r.errors->quantiles_km) out << '\t' << fmt_double(q);
      out << '\t' << fmt_double(r.errors->mean_accuracy);
    } else {
      out << "\t\t\t\t\t\t\t";
    }
    out << '\t' << fmt_double(r.f_score) << '\n';
  }
}

void write_gravity(std::ostream& out, std::span<const GravityRecord> records) {
  out << "gram\tsource\tsupport_total\tmean_dispersion_km\n";
  for (const auto& rec : records)
    out << gram_key(rec.gram) << '\t' << rec.source << '\t' << rec.support_total << '\t'
        << fmt_double(rec.mean_dispersion_km) << '\n';
}

}  // namespace hyperloc
