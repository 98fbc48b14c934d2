#include "hyperloc/modeler.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "hyperloc/errors.hpp"

namespace hyperloc {

namespace {

constexpr std::string_view kRegistryMagic = "hyperloc-registry";
constexpr std::string_view kRegistryVersion = "1";

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void validate(const ModelParams& params) {
  if (!(params.max_area_km2 > 0.0))
    throw config_error("max area must be positive, got " + fmt_double(params.max_area_km2));
  if (!(params.min_ratio > 0.0 && params.min_ratio <= 1.0))
    throw config_error("min ratio must be in (0, 1], got " + fmt_double(params.min_ratio));
  if (params.max_iterations < 1)
    throw config_error("iteration limit must be >= 1, got " + std::to_string(params.max_iterations));
  if (!(params.mahalanobis_radius > 0.0))
    throw config_error("Mahalanobis radius must be positive, got " +
                       fmt_double(params.mahalanobis_radius));
}

Gaussian2D GeoModel::frame_gaussian(const Projection& proj) const {
  Gaussian2D g;
  g.mean = proj.project(center);
  g.cov = cov;
  g.eig = eigen_decompose(cov);
  return g;
}

GeoModel localize_ngram(const NGramStats& stats, const ModelParams& params,
                        const Projection& proj) {
  if (stats.locations.size() < 2)
    throw std::invalid_argument("localize_ngram: insufficient points for '" +
                                gram_key(stats.gram) + "'");

  std::vector<ProjectedPoint> retained;
  retained.reserve(stats.locations.size());
  for (const auto& loc : stats.locations) retained.push_back(proj.project(loc));

  const double total = static_cast<double>(retained.size());
  bool geo_specific = false;
  Gaussian2D gaussian{};
  double area = 0.0;
  int fits = 0;

  for (int iteration = 0; iteration <= params.max_iterations; ++iteration) {
    if (static_cast<double>(retained.size()) / total < params.min_ratio) break;

    gaussian = fit_gaussian(retained);
    ++fits;
    area = core_area_km2(gaussian, params.mahalanobis_radius);
    if (area <= params.max_area_km2) {
      geo_specific = true;
      break;
    }

    std::vector<ProjectedPoint> kept;
    kept.reserve(retained.size());
    for (const auto& p : retained)
      if (ellipse_contains(gaussian, params.mahalanobis_radius, p)) kept.push_back(p);

    // A round that removes nothing can never make progress; further rounds
    // would refit the same set until the iteration limit.
    if (kept.size() == retained.size()) break;
    retained = std::move(kept);
  }

  GeoModel model;
  model.gram = stats.gram;
  model.geo_specific = geo_specific;
  model.center = proj.unproject(gaussian.mean);
  model.cov = gaussian.cov;
  model.support_total = stats.locations.size();
  model.support_final = retained.size();
  model.iterations_used = fits;
  model.core_area_km2 = area;
  return model;
}

std::size_t ModelRegistry::geo_specific_count() const {
  std::size_t n = 0;
  for (const auto& [key, model] : models)
    if (model.geo_specific) ++n;
  return n;
}

std::size_t ModelRegistry::max_gram_len() const {
  std::size_t n = 0;
  for (const auto& [key, model] : models) n = std::max(n, model.gram.size());
  return n;
}

ModelRegistry build_models(const NGramIndex& index, const ModelParams& params,
                           const GeoPoint& origin, unsigned threads) {
  validate(params);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  ModelRegistry registry;
  registry.params = params;
  registry.origin = origin;

  std::vector<const NGramStats*> stats;
  stats.reserve(index.size());
  for (const auto& [key, s] : index) {
    if (s.locations.size() < 2)
      throw config_error("build_models: gram '" + key +
                         "' has fewer than 2 locations; index thresholds too low");
    stats.push_back(&s);
  }

  std::vector<GeoModel> models(stats.size());
  const Projection proj(origin);

  if (threads <= 1 || stats.size() < 2 * threads) {
    for (std::size_t i = 0; i < stats.size(); ++i)
      models[i] = localize_ngram(*stats[i], params, proj);
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (stats.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(stats.size(), begin + chunk);
        for (std::size_t i = begin; i < end; ++i)
          models[i] = localize_ngram(*stats[i], params, proj);
      });
    }
    for (auto& w : workers) w.join();
  }

  for (auto& model : models) {
    std::string key = gram_key(model.gram);
    registry.models.emplace(std::move(key), std::move(model));
  }
  return registry;
}

void save_registry(const ModelRegistry& registry, std::ostream& out) {
  out << kRegistryMagic << '\t' << kRegistryVersion << '\n';
  out << "origin\t" << fmt_double(registry.origin.lat) << '\t' << fmt_double(registry.origin.lon)
      << '\n';
  out << "params\t" << fmt_double(registry.params.max_area_km2) << '\t'
      << fmt_double(registry.params.min_ratio) << '\t' << registry.params.max_iterations << '\t'
      << fmt_double(registry.params.mahalanobis_radius) << '\n';
  out << "models\t" << registry.models.size() << '\n';
  for (const auto& [key, m] : registry.models) {
    out << key << '\t' << (m.geo_specific ? 1 : 0) << '\t' << fmt_double(m.center.lat) << '\t'
        << fmt_double(m.center.lon) << '\t' << fmt_double(m.cov.xx) << '\t' << fmt_double(m.cov.yy)
        << '\t' << fmt_double(m.cov.xy) << '\t' << m.support_total << '\t' << m.support_final
        << '\t' << m.iterations_used << '\t' << fmt_double(m.core_area_km2) << '\n';
  }
}

void save_registry(const ModelRegistry& registry, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write registry file: " + path);
  save_registry(registry, out);
  out.flush();
  if (!out) throw io_error("failed writing registry file: " + path);
}

namespace {

std::vector<std::string> fields_of(const std::string& line) {
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
  return fields;
}

double parse_double_or_throw(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw parse_error("");
    return v;
  } catch (const std::exception&) {
    throw parse_error(std::string("registry: bad ") + what + " value '" + s + "'");
  }
}

std::uint64_t parse_count_or_throw(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw parse_error("");
    return v;
  } catch (const std::exception&) {
    throw parse_error(std::string("registry: bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

ModelRegistry load_registry(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("registry: empty file");
  {
    const auto header = fields_of(line);
    if (header.size() != 2 || header[0] != kRegistryMagic)
      throw parse_error("registry: bad header line '" + line + "'");
    if (header[1] != kRegistryVersion)
      throw parse_error("registry: version mismatch: expected " + std::string(kRegistryVersion) +
                        ", found " + header[1]);
  }

  ModelRegistry registry;

  if (!std::getline(in, line)) throw parse_error("registry: missing origin line");
  {
    const auto f = fields_of(line);
    if (f.size() != 3 || f[0] != "origin") throw parse_error("registry: bad origin line");
    registry.origin.lat = parse_double_or_throw(f[1], "origin lat");
    registry.origin.lon = parse_double_or_throw(f[2], "origin lon");
  }

  if (!std::getline(in, line)) throw parse_error("registry: missing params line");
  {
    const auto f = fields_of(line);
    if (f.size() != 5 || f[0] != "params") throw parse_error("registry: bad params line");
    registry.params.max_area_km2 = parse_double_or_throw(f[1], "max area");
    registry.params.min_ratio = parse_double_or_throw(f[2], "min ratio");
    registry.params.max_iterations =
        static_cast<int>(parse_count_or_throw(f[3], "iteration limit"));
    registry.params.mahalanobis_radius = parse_double_or_throw(f[4], "Mahalanobis radius");
  }

  if (!std::getline(in, line)) throw parse_error("registry: missing models line");
  std::uint64_t expected = 0;
  {
    const auto f = fields_of(line);
    if (f.size() != 2 || f[0] != "models") throw parse_error("registry: bad models line");
    expected = parse_count_or_throw(f[1], "model count");
  }

  for (std::uint64_t i = 0; i < expected; ++i) {
    if (!std::getline(in, line))
      throw parse_error("registry: truncated, expected " + std::to_string(expected) +
                        " models, found " + std::to_string(i));
    const auto f = fields_of(line);
    if (f.size() != 11) throw parse_error("registry: bad model line '" + line + "'");

    GeoModel m;
    m.gram = gram_from_key(f[0]);
    if (m.gram.empty()) throw parse_error("registry: empty gram in model line");
    m.geo_specific = f[1] == "1";
    if (f[1] != "0" && f[1] != "1") throw parse_error("registry: bad geo_specific flag '" + f[1] + "'");
    m.center.lat = parse_double_or_throw(f[2], "center lat");
    m.center.lon = parse_double_or_throw(f[3], "center lon");
    m.cov.xx = parse_double_or_throw(f[4], "var_x");
    m.cov.yy = parse_double_or_throw(f[5], "var_y");
    m.cov.xy = parse_double_or_throw(f[6], "cov_xy");
    m.support_total = parse_count_or_throw(f[7], "support_total");
    m.support_final = parse_count_or_throw(f[8], "support_final");
    m.iterations_used = static_cast<int>(parse_count_or_throw(f[9], "iterations"));
    m.core_area_km2 = parse_double_or_throw(f[10], "core_area");

    const std::string key = f[0];
    if (!registry.models.emplace(key, std::move(m)).second)
      throw parse_error("registry: duplicate gram '" + key + "'");
  }
  if (std::getline(in, line) && !line.empty())
    throw parse_error("registry: trailing content after " + std::to_string(expected) + " models");
  return registry;
}

ModelRegistry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open registry file: " + path);
  return load_registry(in);
}

}  // namespace hyperloc
