#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperloc/corpus.hpp"
#include "hyperloc/evaluator.hpp"

namespace hyperloc {

// Generator for benchmark corpora with known ground truth: per source, a set
// of planted phrases whose posts cluster tightly around a hidden center, a
// set of dispersed phrases posted from anywhere in the bbox, and background
// chatter built from a shared filler vocabulary. Every phrase gets enough
// tweets and users to clear the default index thresholds.
struct SynthParams {
  std::uint64_t seed = 1;
  std::vector<std::string> sources = {"iphone"};
  bool disjoint_vocabulary = false;  // prefix all non-filler tokens per source

  std::size_t planted_per_source = 5;
  std::size_t dispersed_per_source = 20;
  std::size_t background_per_source = 500;

  std::size_t min_phrase_tweets = 30;
  std::size_t max_phrase_tweets = 60;
  std::size_t min_phrase_users = 8;
  std::size_t max_phrase_users = 16;

  double cluster_sigma_km = 0.2;
  double noise_fraction = 0.1;  // planted tweets drawn from the bbox instead
  // Keep planted-phrase noise at least this far from the cluster center
  // (0 = anywhere in the bbox). Far-field noise models posts about a venue
  // made from elsewhere in the city.
  double noise_exclusion_km = 0.0;

  BoundingBox bbox{40.55, -74.15, 40.95, -73.65};

  Instant start{};  // defaults to 2013-01-01 / 2014-07-23 when both zero
  Instant end{};

  std::size_t filler_vocab = 40;
  std::size_t min_fillers_per_item = 2;
  std::size_t max_fillers_per_item = 5;
};

struct PlantedPhrase {
  Gram gram;
  std::string kind;  // "planted" | "dispersed"
  std::string source;
  GeoPoint center;      // cluster center (bbox center for dispersed phrases)
  double sigma_km = 0.0;
  std::size_t n_tweets = 0;
  std::size_t n_users = 0;
  std::size_t n_in_cluster = 0;  // tweets actually drawn from the cluster
};

struct SynthCorpus {
  std::vector<ContentItem> items;     // sorted by timestamp
  std::vector<PlantedPhrase> manifest;
};

SynthCorpus generate_synthetic(const SynthParams& params);

// phrase, kind, source, lat, lon, sigma_km, n_tweets, n_users, n_in_cluster.
void write_manifest(std::ostream& out, std::span<const PlantedPhrase> manifest);

}  // namespace hyperloc
