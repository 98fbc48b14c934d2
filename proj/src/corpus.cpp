#include "hyperloc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hyperloc/errors.hpp"
#include "hyperloc/rng.hpp"

namespace hyperloc {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  y = static_cast<int>(yy + (m <= 2));
}

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

struct RawRecord {
  std::string_view id, user_id, text, lat, lon, source, timestamp, place;
  bool ok = false;
  std::string error;
};

RawRecord split_record(std::string_view line, RecordFormat format) {
  RawRecord raw;
  const auto fields = split_tabs(line);
  if (format == RecordFormat::tsv) {
    if (fields.size() != 7 && fields.size() != 8) {
      raw.error = "expected 7 or 8 tab-separated fields, found " + std::to_string(fields.size());
      return raw;
    }
    raw.id = fields[0];
    raw.user_id = fields[1];
    raw.text = fields[2];
    raw.lat = fields[3];
    raw.lon = fields[4];
    raw.source = fields[5];
    raw.timestamp = fields[6];
    if (fields.size() == 8) raw.place = fields[7];
    raw.ok = true;
    return raw;
  }

  bool saw_lat = false, saw_lon = false;
  for (const auto& field : fields) {
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos) {
      raw.error = "field without '=': " + std::string(field);
      return raw;
    }
    const std::string_view key = field.substr(0, eq);
    const std::string_view value = field.substr(eq + 1);
    if (key == "id") raw.id = value;
    else if (key == "user_id") raw.user_id = value;
    else if (key == "text") raw.text = value;
    else if (key == "lat") { raw.lat = value; saw_lat = true; }
    else if (key == "lon") { raw.lon = value; saw_lon = true; }
    else if (key == "source") raw.source = value;
    else if (key == "timestamp") raw.timestamp = value;
    else if (key == "place") raw.place = value;
    // unknown keys are ignored
  }
  if (raw.id.empty() || raw.user_id.empty() || raw.source.empty() || raw.timestamp.empty()) {
    raw.error = "missing required key (id, user_id, source, timestamp)";
    return raw;
  }
  if (saw_lat != saw_lon) {
    raw.error = "lat and lon must be given together";
    return raw;
  }
  raw.ok = true;
  return raw;
}

}  // namespace

std::optional<Instant> parse_instant(std::string_view text) {
  int y, mo, d, h = 0, mi = 0, se = 0;
  if (text.size() == 10) {
    // YYYY-MM-DD
  } else if (text.size() == 20) {
    if (text[10] != 'T' || text[19] != 'Z') return std::nullopt;
    if (text[13] != ':' || text[16] != ':') return std::nullopt;
    if (!parse_fixed_int(text, 11, 2, h) || !parse_fixed_int(text, 14, 2, mi) ||
        !parse_fixed_int(text, 17, 2, se))
      return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_fixed_int(text, 0, 4, y) || !parse_fixed_int(text, 5, 2, mo) ||
      !parse_fixed_int(text, 8, 2, d))
    return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo)) return std::nullopt;
  if (h > 23 || mi > 59 || se > 59) return std::nullopt;

  const std::int64_t secs = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se;
  return Instant{std::chrono::seconds{secs}};
}

std::string format_instant(Instant t) {
  const std::int64_t total = t.time_since_epoch().count();
  std::int64_t days = total / 86400;
  std::int64_t rem = total % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int y, mo, d;
  civil_from_days(days, y, mo, d);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::optional<RecordFormat> record_format_from_name(std::string_view name) {
  if (name == "tsv") return RecordFormat::tsv;
  if (name == "kv") return RecordFormat::kv;
  return std::nullopt;
}

std::string_view to_string(RecordFormat format) {
  return format == RecordFormat::tsv ? "tsv" : "kv";
}

LoadResult parse_corpus(std::istream& in, RecordFormat format) {
  LoadResult result;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;

  auto skip = [&](const std::string& why) {
    ++result.skipped;
    if (result.warnings.size() < 20)
      result.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const RawRecord raw = split_record(line, format);
    if (!raw.ok) {
      skip(raw.error);
      continue;
    }

    ContentItem item;
    item.id = std::string(raw.id);
    item.user_id = std::string(raw.user_id);
    item.text = std::string(raw.text);
    item.source = std::string(raw.source);
    item.place = std::string(raw.place);

    if (item.id.empty() || item.user_id.empty()) {
      skip("empty id or user_id");
      continue;
    }
    if (!seen_ids.insert(item.id).second) {
      skip("duplicate id '" + item.id + "'");
      continue;
    }

    const auto ts = parse_instant(raw.timestamp);
    if (!ts) {
      skip("bad timestamp '" + std::string(raw.timestamp) + "'");
      seen_ids.erase(item.id);
      continue;
    }
    item.timestamp = *ts;

    if (raw.lat.empty() != raw.lon.empty()) {
      skip("lat and lon must be given together");
      seen_ids.erase(item.id);
      continue;
    }
    if (!raw.lat.empty()) {
      const auto lat = parse_double(raw.lat);
      const auto lon = parse_double(raw.lon);
      if (!lat || !lon) {
        skip("unparseable coordinates");
        seen_ids.erase(item.id);
        continue;
      }
      if (!valid_coordinates(*lat, *lon)) {
        skip("coordinates out of range (" + std::string(raw.lat) + ", " + std::string(raw.lon) + ")");
        seen_ids.erase(item.id);
        continue;
      }
      item.location = GeoPoint{*lat, *lon};
    }

    result.items.push_back(std::move(item));
  }
  return result;
}

LoadResult load_corpus(const std::string& path, RecordFormat format) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open corpus file: " + path);
  return parse_corpus(in, format);
}

namespace {

std::string coord_to_string(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Record fields may not contain the framing characters.
std::string sanitize_field(std::string value) {
  for (char& c : value)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return value;
}

}  // namespace

std::string format_record(const ContentItem& item, RecordFormat format) {
  const std::string lat = item.location ? coord_to_string(item.location->lat) : "";
  const std::string lon = item.location ? coord_to_string(item.location->lon) : "";
  const std::string id = sanitize_field(item.id);
  const std::string user = sanitize_field(item.user_id);
  const std::string text = sanitize_field(item.text);
  const std::string source = sanitize_field(item.source);
  const std::string place = sanitize_field(item.place);
  std::ostringstream out;
  if (format == RecordFormat::tsv) {
    out << id << '\t' << user << '\t' << text << '\t' << lat << '\t' << lon << '\t' << source
        << '\t' << format_instant(item.timestamp);
    if (!place.empty()) out << '\t' << place;
  } else {
    out << "id=" << id << "\tuser_id=" << user << "\ttext=" << text;
    if (item.location) out << "\tlat=" << lat << "\tlon=" << lon;
    out << "\tsource=" << source << "\ttimestamp=" << format_instant(item.timestamp);
    if (!place.empty()) out << "\tplace=" << place;
  }
  return out.str();
}

void write_corpus(std::ostream& out, std::span<const ContentItem> items, RecordFormat format) {
  for (const auto& item : items) out << format_record(item, format) << '\n';
}

void write_corpus(const std::string& path, std::span<const ContentItem> items,
                  RecordFormat format) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write corpus file: " + path);
  write_corpus(out, items, format);
}

std::vector<ContentItem> filter_by_source(const std::vector<ContentItem>& items,
                                          const std::string& source,
                                          std::size_t all_sample_size, std::uint64_t seed) {
  if (source == "all") {
    if (all_sample_size == 0) return items;
    return downsample(items, all_sample_size, seed);
  }

  std::vector<ContentItem> out;
  for (const auto& item : items)
    if (item.source == source) out.push_back(item);

  if (out.empty() && !items.empty()) {
    const auto tags = source_tags(items);
    if (std::find(tags.begin(), tags.end(), source) == tags.end()) {
      std::string known = "all";
      for (const auto& t : tags) known += ", " + t;
      throw config_error("unknown source tag '" + source + "' (known: " + known + ")");
    }
  }
  return out;
}

std::vector<ContentItem> downsample(const std::vector<ContentItem>& items, std::size_t n,
                                    std::uint64_t seed) {
  if (n >= items.size()) return items;
  Rng rng(seed);
  const auto idx = sample_indices(items.size(), n, rng);
  std::vector<ContentItem> out;
  out.reserve(n);
  for (const std::size_t i : idx) out.push_back(items[i]);
  return out;
}

CorpusSplit temporal_split(const std::vector<ContentItem>& items, Instant train_end,
                           Instant test_start) {
  if (!(train_end < test_start))
    throw config_error("temporal_split: train_end must precede test_start (" +
                       format_instant(train_end) + " vs " + format_instant(test_start) + ")");

  CorpusSplit split;
  split.gap = test_start - train_end;
  for (const auto& item : items) {
    if (item.timestamp <= train_end)
      split.train.push_back(item);
    else if (item.timestamp >= test_start)
      split.test.push_back(item);
  }
  if (split.train.empty()) split.warnings.push_back("temporal_split: empty train partition");
  if (split.test.empty()) split.warnings.push_back("temporal_split: empty test partition");
  return split;
}

std::vector<ContentItem> with_location(const std::vector<ContentItem>& items) {
  std::vector<ContentItem> out;
  for (const auto& item : items)
    if (item.location) out.push_back(item);
  return out;
}

std::vector<std::string> source_tags(const std::vector<ContentItem>& items) {
  std::vector<std::string> tags;
  for (const auto& item : items)
    if (std::find(tags.begin(), tags.end(), item.source) == tags.end())
      tags.push_back(item.source);
  std::sort(tags.begin(), tags.end());
  return tags;
}

GeoPoint corpus_centroid(const std::vector<ContentItem>& items) {
  double lat = 0.0, lon = 0.0;
  std::size_t n = 0;
  for (const auto& item : items) {
    if (!item.location) continue;
    lat += item.location->lat;
    lon += item.location->lon;
    ++n;
  }
  if (n == 0) throw config_error("corpus_centroid: no located items");
  return {lat / static_cast<double>(n), lon / static_cast<double>(n)};
}

}  // namespace hyperloc
