#include <map>
#include <sstream>

#include "doctest.h"
#include "hyperloc/errors.hpp"
#include "hyperloc/synth.hpp"
#include "hyperloc/textproc.hpp"
#include "support/fixtures.hpp"

using namespace hyperloc;

TEST_CASE("tokenize lowercases, strips boundary punctuation and stopwords") {
  const auto& stop = fixtures::stopwords();

  CHECK(tokenize("Madison Square Park!", stop) ==
        std::vector<std::string>{"madison", "square", "park"});
  CHECK(tokenize("I am at the", stop).empty());
  CHECK(tokenize("New York Public Library", stop) ==
        std::vector<std::string>{"new", "york", "public", "library"});

  // sigils survive, trailing punctuation does not
  CHECK(tokenize("#NYC!!! rocks", stop) == std::vector<std::string>{"#nyc", "rocks"});
  CHECK(tokenize("thanks @Alice, (really)", stop) ==
        std::vector<std::string>{"thanks", "@alice", "really"});

  // interior punctuation is preserved
  CHECK(tokenize("don't stop", stop) == std::vector<std::string>{"don't", "stop"});

  // unicode punctuation at boundaries, unicode whitespace as separator
  CHECK(tokenize("“quoted” café… one two", stop) ==
        std::vector<std::string>{"quoted", "café", "one", "two"});

  CHECK(tokenize("", stop).empty());
  CHECK(tokenize("... --- !!!", stop).empty());
}

TEST_CASE("tokenize_item appends the place description") {
  const auto& stop = fixtures::stopwords();
  auto it = fixtures::item("t1", "u1", "great view", 40.75, -73.98);
  it.place = "Empire State Building";
  CHECK(tokenize_item(it, stop) ==
        std::vector<std::string>{"great", "view", "empire", "state", "building"});
}

TEST_CASE("extract_ngrams enumerates contiguous subsequences in order") {
  CHECK(extract_ngrams({"a"}, 3) == std::vector<Gram>{{"a"}});

  const auto grams = extract_ngrams({"a", "b", "c"}, 3);
  const std::vector<Gram> expected{{"a"}, {"b"}, {"c"}, {"a", "b"}, {"b", "c"}, {"a", "b", "c"}};
  CHECK(grams == expected);

  const auto nypl = extract_ngrams({"new", "york", "public", "library"}, 3);
  const Gram left{"new", "york", "public"};
  const Gram right{"york", "public", "library"};
  CHECK(std::find(nypl.begin(), nypl.end(), left) != nypl.end());
  CHECK(std::find(nypl.begin(), nypl.end(), right) != nypl.end());

  CHECK(extract_ngrams({}, 3).empty());
}

TEST_CASE("contains_gram checks contiguity") {
  CHECK(contains_gram({"a", "b", "c"}, {"b", "c"}));
  CHECK_FALSE(contains_gram({"a", "b", "c"}, {"a", "c"}));
  CHECK_FALSE(contains_gram({"a"}, {"a", "b"}));
  CHECK(contains_gram({"a", "b", "c"}, {"a", "b", "c"}));
  CHECK_FALSE(contains_gram({"a", "b"}, {}));
}

TEST_CASE("gram_key round trips") {
  const Gram g{"new", "york"};
  CHECK(gram_key(g) == "new york");
  CHECK(gram_from_key("new york") == g);
  CHECK(gram_from_key("") == Gram{});
}

namespace {

// n tweets split across k users, all containing `phrase`.
std::vector<ContentItem> phrase_corpus(const std::string& phrase, std::size_t n_tweets,
                                       std::size_t n_users, std::size_t& next_id) {
  std::vector<ContentItem> items;
  for (std::size_t i = 0; i < n_tweets; ++i) {
    items.push_back(fixtures::item("t" + std::to_string(next_id++),
                                   "u" + phrase.substr(0, 3) + std::to_string(i % n_users),
                                   phrase, 40.75, -73.98));
  }
  return items;
}

}  // namespace

TEST_CASE("build_index applies the user and tweet thresholds") {
  std::size_t next_id = 0;
  std::vector<ContentItem> corpus;
  // 25 tweets but only 3 users: excluded.
  for (auto& it : phrase_corpus("alpha spot", 25, 3, next_id)) corpus.push_back(std::move(it));
  // 19 tweets by 19 users: excluded.
  for (auto& it : phrase_corpus("bravo spot", 19, 19, next_id)) corpus.push_back(std::move(it));
  // 20 tweets by 5 users: included.
  for (auto& it : phrase_corpus("carol spot", 20, 5, next_id)) corpus.push_back(std::move(it));

  const auto index = build_index(corpus, fixtures::stopwords());
  CHECK(index.find("alpha spot") == index.end());
  CHECK(index.find("alpha") == index.end());
  CHECK(index.find("bravo spot") == index.end());
  REQUIRE(index.find("carol spot") != index.end());

  const auto& stats = index.at("carol spot");
  CHECK(stats.tweet_ids.size() == 20);
  CHECK(stats.user_ids.size() == 5);
  CHECK(stats.locations.size() == 20);

  // "spot" spans all three phrases: 64 tweets, 27 users -> included.
  REQUIRE(index.find("spot") != index.end());
  CHECK(index.at("spot").tweet_ids.size() == 64);

  // Brute-force oracle: count per-gram users/tweets by direct scan and
  // compare the filtered set with the index.
  std::map<std::string, std::set<std::string>> users, tweets;
  for (const auto& item : corpus) {
    const auto tokens = tokenize_item(item, fixtures::stopwords());
    for (const auto& gram : extract_ngrams(tokens, 3)) {
      users[gram_key(gram)].insert(item.user_id);
      tweets[gram_key(gram)].insert(item.id);
    }
  }
  std::size_t n_expected = 0;
  for (const auto& [key, tw] : tweets)
    if (tw.size() >= 20 && users[key].size() >= 5) ++n_expected;
  CHECK(index.size() == n_expected);
  for (const auto& [key, stats2] : index) {
    CHECK(tweets.at(key).size() == stats2.tweet_ids.size());
    CHECK(users.at(key).size() == stats2.user_ids.size());
  }
}

TEST_CASE("build_index requires located items") {
  const std::vector<ContentItem> corpus{fixtures::unlocated_item("t1", "u1", "hello")};
  CHECK_THROWS_AS(build_index(corpus, fixtures::stopwords()), config_error);
}

TEST_CASE("a gram repeated inside one tweet counts the tweet once") {
  std::size_t next_id = 0;
  auto corpus = phrase_corpus("echo echo echo", 20, 5, next_id);
  IndexParams params;
  const auto index = build_index(corpus, fixtures::stopwords(), params);
  REQUIRE(index.find("echo") != index.end());
  CHECK(index.at("echo").tweet_ids.size() == 20);
  CHECK(index.at("echo").locations.size() == 20);
  REQUIRE(index.find("echo echo") != index.end());
  CHECK(index.at("echo echo").tweet_ids.size() == 20);
}

TEST_CASE("index round-trip consistency, stopword freedom, parallel equality") {
  SynthParams params;
  params.seed = 77;
  params.planted_per_source = 3;
  params.dispersed_per_source = 6;
  params.background_per_source = 200;
  const auto synth = generate_synthetic(params);

  const auto& stop = fixtures::stopwords();
  const auto serial = build_index(synth.items, stop, {}, 1);
  const auto parallel = build_index(synth.items, stop, {}, 4);

  REQUIRE(serial.size() == parallel.size());
  auto it_s = serial.begin();
  auto it_p = parallel.begin();
  for (; it_s != serial.end(); ++it_s, ++it_p) {
    CHECK(it_s->first == it_p->first);
    CHECK(it_s->second.tweet_ids == it_p->second.tweet_ids);
    CHECK(it_s->second.user_ids == it_p->second.user_ids);
    REQUIRE(it_s->second.locations.size() == it_p->second.locations.size());
    for (std::size_t i = 0; i < it_s->second.locations.size(); ++i) {
      CHECK(it_s->second.locations[i].lat == it_p->second.locations[i].lat);
      CHECK(it_s->second.locations[i].lon == it_p->second.locations[i].lon);
    }
  }

  std::map<std::string, const ContentItem*> by_id;
  for (const auto& item : synth.items) by_id[item.id] = &item;

  for (const auto& [key, stats] : serial) {
    CHECK(stats.locations.size() == stats.tweet_ids.size());
    for (const auto& token : stats.gram) CHECK_FALSE(stop.contains(token));
    for (const auto& id : stats.tweet_ids) {
      const auto tokens = tokenize_item(*by_id.at(id), stop);
      CHECK(contains_gram(tokens, stats.gram));
    }
  }
}

TEST_CASE("dump_index emits gram, users, tweets") {
  std::size_t next_id = 0;
  const auto corpus = phrase_corpus("delta spot", 21, 6, next_id);
  const auto index = build_index(corpus, fixtures::stopwords());
  std::ostringstream out;
  dump_index(out, index);
  CHECK(out.str().find("delta spot\t6\t21\n") != std::string::npos);
}
