#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperloc/geomath.hpp"

namespace hyperloc {

using Instant = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DDTHH:MM:SSZ" and the date-only shorthand "YYYY-MM-DD"
// (midnight UTC). Returns nullopt on anything else.
std::optional<Instant> parse_instant(std::string_view text);
std::string format_instant(Instant t);

struct ContentItem {
  std::string id;
  std::string user_id;
  std::string text;
  std::optional<GeoPoint> location;
  std::string source;
  Instant timestamp{};
  std::string place;  // optional free-text place description
};

enum class RecordFormat { tsv, kv };

std::optional<RecordFormat> record_format_from_name(std::string_view name);
std::string_view to_string(RecordFormat format);

struct LoadResult {
  std::vector<ContentItem> items;
  std::size_t skipped = 0;                // malformed records dropped
  std::vector<std::string> warnings;      // reasons for the first few skips
};

LoadResult load_corpus(const std::string& path, RecordFormat format);
LoadResult parse_corpus(std::istream& in, RecordFormat format);

std::string format_record(const ContentItem& item, RecordFormat format);
void write_corpus(std::ostream& out, std::span<const ContentItem> items, RecordFormat format);
void write_corpus(const std::string& path, std::span<const ContentItem> items, RecordFormat format);

// Exclusive source tags pass through as an exact filter. The pseudo-tag "all"
// instead draws a uniform random sample of `all_sample_size` items from the
// whole corpus (0 keeps everything), which statistically mirrors the
// full-corpus source proportions. Unknown tags raise config_error listing the
// tags present.
std::vector<ContentItem> filter_by_source(const std::vector<ContentItem>& items,
                                          const std::string& source,
                                          std::size_t all_sample_size = 0,
                                          std::uint64_t seed = 0);

// Seeded uniform downsample without replacement, corpus order preserved.
// n >= items.size() returns a copy.
std::vector<ContentItem> downsample(const std::vector<ContentItem>& items, std::size_t n,
                                    std::uint64_t seed);

struct CorpusSplit {
  std::vector<ContentItem> train;  // timestamp <= train_end
  std::vector<ContentItem> test;   // timestamp >= test_start
  std::chrono::seconds gap{0};     // test_start - train_end
  std::vector<std::string> warnings;
};

// Items strictly inside the gap are discarded. Throws config_error unless
// train_end < test_start. Empty partitions warn, they do not fail.
CorpusSplit temporal_split(const std::vector<ContentItem>& items, Instant train_end,
                           Instant test_start);

// Items eligible for training (location present).
std::vector<ContentItem> with_location(const std::vector<ContentItem>& items);

// Distinct source tags, sorted.
std::vector<std::string> source_tags(const std::vector<ContentItem>& items);

// Mean lat/lon over located items; the projection origin used for modeling.
// Throws config_error when no item has a location.
GeoPoint corpus_centroid(const std::vector<ContentItem>& items);

}  // namespace hyperloc
