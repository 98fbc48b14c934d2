#include "hyperloc/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <thread>

#include "hyperloc/errors.hpp"

namespace hyperloc {

namespace {

// Minimal UTF-8 decoding: returns (codepoint, byte length); malformed bytes
// decode as U+FFFD of length 1 so tokenization stays total.
std::pair<char32_t, std::size_t> decode_utf8(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) return {b0, 1};

  auto cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    const char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
    return cp >= 0x80 ? std::pair<char32_t, std::size_t>{cp, 2}
                      : std::pair<char32_t, std::size_t>{0xFFFD, 1};
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    const char32_t cp = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
    return cp >= 0x800 ? std::pair<char32_t, std::size_t>{cp, 3}
                       : std::pair<char32_t, std::size_t>{0xFFFD, 1};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    const char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                        ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
    return cp >= 0x10000 && cp <= 0x10FFFF ? std::pair<char32_t, std::size_t>{cp, 4}
                                           : std::pair<char32_t, std::size_t>{0xFFFD, 1};
  }
  return {0xFFFD, 1};
}

bool is_space_cp(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Punctuation stripped from token boundaries: ASCII punctuation plus the
// common Unicode punctuation blocks seen in social-media text (curly quotes,
// dashes, ellipses, CJK and fullwidth forms).
bool is_boundary_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'!' && cp <= U'/') || (cp >= U':' && cp <= U'@') ||
           (cp >= U'[' && cp <= U'`') || (cp >= U'{' && cp <= U'~');
  }
  return (cp >= 0x00A1 && cp <= 0x00BF) || (cp >= 0x2010 && cp <= 0x2027) ||
         (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x2E00 && cp <= 0x2E7F) ||
         (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

std::vector<std::pair<char32_t, std::size_t>> codepoints(std::string_view s) {
  std::vector<std::pair<char32_t, std::size_t>> cps;  // (codepoint, byte offset)
  std::size_t i = 0;
  while (i < s.size()) {
    const auto [cp, len] = decode_utf8(s, i);
    cps.emplace_back(cp, i);
    i += len;
  }
  return cps;
}

// Strip boundary punctuation and lowercase ASCII; empty result means drop.
std::string normalize_token(std::string_view raw) {
  auto cps = codepoints(raw);
  std::size_t begin = 0, end = cps.size();
  while (end > begin && is_boundary_punct(cps[end - 1].first)) --end;
  while (begin < end && is_boundary_punct(cps[begin].first)) {
    if (cps[begin].first == U'#' || cps[begin].first == U'@') break;  // keep sigils
    ++begin;
  }
  if (begin >= end) return {};

  const std::size_t byte_begin = cps[begin].second;
  const std::size_t byte_end = end < cps.size() ? cps[end].second : raw.size();
  std::string out(raw.substr(byte_begin, byte_end - byte_begin));
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + ('a' - 'A'));
  return out;
}

}  // namespace

StopwordSet StopwordSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open stopword file: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    set.words_.insert(line);
  }
  return set;
}

StopwordSet StopwordSet::from_words(const std::vector<std::string>& words) {
  StopwordSet set;
  set.words_.insert(words.begin(), words.end());
  return set;
}

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto [cp, len] = decode_utf8(text, i);
    if (is_space_cp(cp)) {
      i += len;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size()) {
      const auto [cp2, len2] = decode_utf8(text, i);
      if (is_space_cp(cp2)) break;
      i += len2;
    }
    std::string token = normalize_token(text.substr(start, i - start));
    if (!token.empty() && !stopwords.contains(token)) tokens.push_back(std::move(token));
  }
  return tokens;
}

std::vector<std::string> tokenize_item(const ContentItem& item, const StopwordSet& stopwords) {
  if (item.place.empty()) return tokenize(item.text, stopwords);
  std::string combined = item.text;
  combined += ' ';
  combined += item.place;
  return tokenize(combined, stopwords);
}

std::string gram_key(const Gram& gram) {
  std::string key;
  for (std::size_t i = 0; i < gram.size(); ++i) {
    if (i > 0) key += ' ';
    key += gram[i];
  }
  return key;
}

Gram gram_from_key(std::string_view key) {
  Gram gram;
  std::size_t start = 0;
  while (start <= key.size()) {
    const std::size_t space = key.find(' ', start);
    if (space == std::string_view::npos) {
      if (start < key.size()) gram.emplace_back(key.substr(start));
      break;
    }
    if (space > start) gram.emplace_back(key.substr(start, space - start));
    start = space + 1;
  }
  return gram;
}

std::vector<Gram> extract_ngrams(const std::vector<std::string>& tokens, std::size_t max_n) {
  std::vector<Gram> grams;
  for (std::size_t n = 1; n <= max_n && n <= tokens.size(); ++n)
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      grams.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  return grams;
}

bool contains_gram(const std::vector<std::string>& tokens, const Gram& gram) {
  if (gram.empty() || gram.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + gram.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < gram.size(); ++j) {
      if (tokens[i + j] != gram[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

namespace {

void index_item(NGramIndex& index, const ContentItem& item, const StopwordSet& stopwords,
                const IndexParams& params) {
  const auto tokens = tokenize_item(item, stopwords);

  // A gram occurring twice in one item still counts the item once.
  std::vector<std::string> seen;
  for (auto& gram : extract_ngrams(tokens, params.max_ngram)) {
    std::string key = gram_key(gram);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);

    auto [it, inserted] = index.try_emplace(std::move(key));
    NGramStats& stats = it->second;
    if (inserted) stats.gram = std::move(gram);
    if (stats.tweet_ids.insert(item.id).second) {
      stats.user_ids.insert(item.user_id);
      stats.locations.push_back(*item.location);
    }
  }
}

// Merge src into dst keeping dst's (earlier) location ordering first.
// Item ids are unique corpus-wide, so shards never share a tweet id.
void merge_index(NGramIndex& dst, NGramIndex&& src) {
  for (auto& [key, stats] : src) {
    auto [it, inserted] = dst.try_emplace(key);
    if (inserted) {
      it->second = std::move(stats);
      continue;
    }
    NGramStats& out = it->second;
    for (const auto& tweet_id : stats.tweet_ids)
      if (!out.tweet_ids.insert(tweet_id).second)
        throw config_error("build_index: duplicate item id '" + tweet_id + "'");
    out.user_ids.merge(stats.user_ids);
    out.locations.insert(out.locations.end(), stats.locations.begin(), stats.locations.end());
  }
}

}  // namespace

NGramIndex build_index(const std::vector<ContentItem>& train_items, const StopwordSet& stopwords,
                       const IndexParams& params, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  for (const auto& item : train_items)
    if (!item.location)
      throw config_error("build_index: item '" + item.id + "' has no location");

  NGramIndex index;
  if (threads <= 1 || train_items.size() < 2 * threads) {
    for (const auto& item : train_items) index_item(index, item, stopwords, params);
  } else {
    // Contiguous shards merged in shard order reproduce the serial
    // per-gram location ordering exactly.
    std::vector<NGramIndex> shards(threads);
    std::vector<std::thread> workers;
    const std::size_t chunk = (train_items.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(train_items.size(), begin + chunk);
        for (std::size_t i = begin; i < end; ++i)
          index_item(shards[t], train_items[i], stopwords, params);
      });
    }
    for (auto& w : workers) w.join();
    for (auto& shard : shards) merge_index(index, std::move(shard));
  }

  std::erase_if(index, [&](const auto& entry) {
    return entry.second.user_ids.size() < params.min_users ||
           entry.second.tweet_ids.size() < params.min_tweets;
  });
  return index;
}

void dump_index(std::ostream& out, const NGramIndex& index) {
  for (const auto& [key, stats] : index)
    out << key << '\t' << stats.user_ids.size() << '\t' << stats.tweet_ids.size() << '\n';
}

}  // namespace hyperloc
