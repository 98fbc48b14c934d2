#include "hyperloc/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "hyperloc/errors.hpp"
#include "hyperloc/rng.hpp"

namespace hyperloc {

namespace {

std::string zero_pad(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Generator {
  const SynthParams& params;
  Rng rng;
  Projection proj;
  Instant start, end;
  std::size_t next_id = 0;
  SynthCorpus out;

  Generator(const SynthParams& p, Instant s, Instant e)
      : params(p),
        rng(p.seed),
        proj({0.5 * (p.bbox.lat_min + p.bbox.lat_max), 0.5 * (p.bbox.lon_min + p.bbox.lon_max)}),
        start(s),
        end(e) {}

  Instant random_instant() {
    const auto range = static_cast<std::uint64_t>((end - start).count());
    return start + std::chrono::seconds(static_cast<std::int64_t>(rng.below(range)));
  }

  GeoPoint uniform_location() {
    return {rng.uniform(params.bbox.lat_min, params.bbox.lat_max),
            rng.uniform(params.bbox.lon_min, params.bbox.lon_max)};
  }

  GeoPoint noise_location(const GeoPoint& center) {
    if (params.noise_exclusion_km <= 0.0) return uniform_location();
    for (int attempt = 0; attempt < 256; ++attempt) {
      const GeoPoint p = uniform_location();
      if (haversine_km(p, center) >= params.noise_exclusion_km) return p;
    }
    throw config_error("generate_synthetic: noise exclusion radius leaves no room in the bbox");
  }

  GeoPoint cluster_location(const GeoPoint& center, double sigma_km) {
    const ProjectedPoint c = proj.project(center);
    return proj.unproject({rng.normal(c.x, sigma_km), rng.normal(c.y, sigma_km)});
  }

  GeoPoint phrase_center() {
    const double lat_margin = 0.1 * (params.bbox.lat_max - params.bbox.lat_min);
    const double lon_margin = 0.1 * (params.bbox.lon_max - params.bbox.lon_min);
    return {rng.uniform(params.bbox.lat_min + lat_margin, params.bbox.lat_max - lat_margin),
            rng.uniform(params.bbox.lon_min + lon_margin, params.bbox.lon_max - lon_margin)};
  }

  std::string filler(const std::string& prefix) {
    return prefix + "filler" + zero_pad(rng.index(std::max<std::size_t>(1, params.filler_vocab)), 2);
  }

  std::string fillers(const std::string& prefix, std::size_t lo, std::size_t hi) {
    const std::size_t n = lo + rng.index(hi - lo + 1);
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
      if (!text.empty()) text += ' ';
      text += filler(prefix);
    }
    return text;
  }

  void add_item(const std::string& user, std::string text, GeoPoint location,
                const std::string& source) {
    ContentItem item;
    item.id = "t" + zero_pad(next_id++, 6);
    item.user_id = user;
    item.text = std::move(text);
    item.location = location;
    item.source = source;
    item.timestamp = random_instant();
    out.items.push_back(std::move(item));
  }

  void emit_phrase(const std::string& source, const std::string& prefix, const std::string& stem,
                   std::size_t index, bool planted) {
    const std::string base = prefix + stem + zero_pad(index, 3);
    PlantedPhrase phrase;
    phrase.gram = {base + "a", base + "b"};
    phrase.kind = planted ? "planted" : "dispersed";
    phrase.source = source;
    phrase.sigma_km = planted ? params.cluster_sigma_km : 0.0;
    phrase.center = planted ? phrase_center()
                            : GeoPoint{0.5 * (params.bbox.lat_min + params.bbox.lat_max),
                                       0.5 * (params.bbox.lon_min + params.bbox.lon_max)};

    const std::size_t n_tweets =
        params.min_phrase_tweets +
        rng.index(params.max_phrase_tweets - params.min_phrase_tweets + 1);
    std::size_t n_users =
        params.min_phrase_users + rng.index(params.max_phrase_users - params.min_phrase_users + 1);
    n_users = std::min(n_users, n_tweets);

    phrase.n_tweets = n_tweets;
    phrase.n_users = n_users;

    // Exact noise share per phrase, so the advertised in-cluster mass is a
    // guarantee rather than an expectation.
    const std::size_t n_noise =
        planted ? static_cast<std::size_t>(params.noise_fraction * static_cast<double>(n_tweets))
                : n_tweets;

    for (std::size_t j = 0; j < n_tweets; ++j) {
      GeoPoint loc;
      if (planted && j >= n_noise) {
        loc = cluster_location(phrase.center, phrase.sigma_km);
        ++phrase.n_in_cluster;
      } else if (planted) {
        loc = noise_location(phrase.center);
      } else {
        loc = uniform_location();
      }
      std::string text = fillers(prefix, 0, 2);
      if (!text.empty()) text += ' ';
      text += phrase.gram[0] + ' ' + phrase.gram[1];
      const std::string tail = fillers(prefix, 1, 3);
      if (!tail.empty()) text += ' ' + tail;

      const std::string user =
          "u-" + source + "-" + stem + zero_pad(index, 3) + "-" + zero_pad(j % n_users, 2);
      add_item(user, std::move(text), loc, source);
    }
    out.manifest.push_back(std::move(phrase));
  }

  void run() {
    for (const auto& source : params.sources) {
      const std::string prefix = params.disjoint_vocabulary ? source + "_" : "";
      for (std::size_t i = 0; i < params.planted_per_source; ++i)
        emit_phrase(source, prefix, "venue", i, true);
      for (std::size_t i = 0; i < params.dispersed_per_source; ++i)
        emit_phrase(source, prefix, "spread", i, false);

      const std::size_t user_pool = std::max<std::size_t>(1, params.background_per_source / 5);
      for (std::size_t i = 0; i < params.background_per_source; ++i) {
        const std::string user = "u-" + source + "-bg-" + zero_pad(rng.index(user_pool), 3);
        add_item(user, fillers(prefix, 3, 6), uniform_location(), source);
      }
    }
    std::stable_sort(out.items.begin(), out.items.end(),
                     [](const ContentItem& a, const ContentItem& b) {
                       if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                       return a.id < b.id;
                     });
  }
};

}  // namespace

SynthCorpus generate_synthetic(const SynthParams& params) {
  if (!params.bbox.valid()) throw config_error("generate_synthetic: invalid bounding box");
  if (params.sources.empty()) throw config_error("generate_synthetic: no sources given");
  if (params.min_phrase_tweets == 0 || params.max_phrase_tweets < params.min_phrase_tweets ||
      params.min_phrase_users == 0 || params.max_phrase_users < params.min_phrase_users)
    throw config_error("generate_synthetic: bad phrase tweet/user bounds");
  if (!(params.noise_fraction >= 0.0 && params.noise_fraction < 1.0))
    throw config_error("generate_synthetic: noise fraction must be in [0, 1)");
  if (!(params.cluster_sigma_km > 0.0))
    throw config_error("generate_synthetic: cluster sigma must be positive");

  Instant start = params.start;
  Instant end = params.end;
  if (start.time_since_epoch().count() == 0 && end.time_since_epoch().count() == 0) {
    start = *parse_instant("2013-01-01");
    end = *parse_instant("2014-07-23");
  }
  if (!(start < end)) throw config_error("generate_synthetic: start must precede end");

  Generator gen(params, start, end);
  gen.run();
  return std::move(gen.out);
}

void write_manifest(std::ostream& out, std::span<const PlantedPhrase> manifest) {
  out << "phrase\tkind\tsource\tlat\tlon\tsigma_km\tn_tweets\tn_users\tn_in_cluster\n";
  for (const auto& p : manifest) {
    out << gram_key(p.gram) << '\t' << p.kind << '\t' << p.source << '\t'
        << fmt_double(p.center.lat) << '\t' << fmt_double(p.center.lon) << '\t'
        << fmt_double(p.sigma_km) << '\t' << p.n_tweets << '\t' << p.n_users << '\t'
        << p.n_in_cluster << '\n';
  }
}

}  // namespace hyperloc
