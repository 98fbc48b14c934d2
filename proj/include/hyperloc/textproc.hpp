#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hyperloc/corpus.hpp"

namespace hyperloc {

class StopwordSet {
 public:
  StopwordSet() = default;

  // One token per line, UTF-8, '#'-prefixed lines ignored. Throws io_error.
  static StopwordSet load(const std::string& path);
  static StopwordSet from_words(const std::vector<std::string>& words);

  bool contains(const std::string& token) const { return words_.count(token) != 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Whitespace-split, ASCII-lowercased tokens with boundary punctuation
// stripped (leading '#'/'@' sigils kept) and stopwords removed. Total:
// any input yields a (possibly empty) token list.
std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords);

// Tokens for an item: text plus the optional place description.
std::vector<std::string> tokenize_item(const ContentItem& item, const StopwordSet& stopwords);

using Gram = std::vector<std::string>;

// Canonical map key: tokens joined by a single space (tokens never contain
// whitespace, so the join is unambiguous).
std::string gram_key(const Gram& gram);
Gram gram_from_key(std::string_view key);

// All contiguous subsequences of length 1..max_n, shortest first, each
// length in positional order.
std::vector<Gram> extract_ngrams(const std::vector<std::string>& tokens, std::size_t max_n);

// True iff gram occurs as a contiguous token subsequence.
bool contains_gram(const std::vector<std::string>& tokens, const Gram& gram);

struct NGramStats {
  Gram gram;
  std::set<std::string> tweet_ids;
  std::set<std::string> user_ids;
  std::vector<GeoPoint> locations;  // one per containing item, corpus order
};

struct IndexParams {
  std::size_t max_ngram = 3;
  std::size_t min_users = 5;    // grams used by fewer unique users are dropped
  std::size_t min_tweets = 20;  // grams in fewer unique tweets are dropped
};

using NGramIndex = std::map<std::string, NGramStats>;

// Candidate n-gram index over a training corpus. Every item must carry a
// location (throws config_error otherwise). Sharded across `threads` with an
// order-preserving merge, so the result is identical for any thread count.
NGramIndex build_index(const std::vector<ContentItem>& train_items, const StopwordSet& stopwords,
                       const IndexParams& params = {}, unsigned threads = 1);

// Debug dump: gram, user count, tweet count, tab-separated, sorted by gram.
void dump_index(std::ostream& out, const NGramIndex& index);

}  // namespace hyperloc
