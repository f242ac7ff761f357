#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "paperharvest/features.hpp"

using namespace paperharvest;

namespace {

search::SearchResult result(int rank, std::string url, std::string title = "",
                            std::string snippet = "") {
  search::SearchResult r;
  r.rank = rank;
  r.url = std::move(url);
  r.page_title = std::move(title);
  r.snippet = std::move(snippet);
  return r;
}

features::LabeledPage page_of(const search::Query& q, std::vector<search::SearchResult> results,
                              int homepage_rank) {
  features::LabeledPage lp;
  lp.page.query = q;
  lp.page.results = std::move(results);
  lp.homepage_rank = homepage_rank;
  return lp;
}

}  // namespace

TEST_CASE("tokenize_url splits host labels and path segments") {
  auto t = features::tokenize_url("www.cse.iitb.ac.in/~soumen");
  CHECK(t.domain == std::vector<std::string>{"www", "cse", "iitb", "ac", "in"});
  CHECK(t.path == std::vector<std::string>{"soumen"});
}

TEST_CASE("tokenize_url drops scheme, port, query, and fragment") {
  auto t = features::tokenize_url("HTTP://Cs.Example.EDU:8080/People/Jane/?q=1#top");
  CHECK(t.domain == std::vector<std::string>{"cs", "example", "edu"});
  CHECK(t.path == std::vector<std::string>{"people", "jane"});
}

TEST_CASE("tokenize_url rejects URLs without a host") {
  CHECK_THROWS_AS(features::tokenize_url("http:///path/only"), InvalidUrlError);
  CHECK_THROWS_AS(features::tokenize_url(""), InvalidUrlError);
}

TEST_CASE("name match: partial surname hit on a tilde path") {
  auto f = features::name_match_features("Soumen Chakrabarti", "www.cse.iitb.ac.in/~soumen");
  CHECK(f.has_match == true);
  CHECK(f.frac_match == 0.5);
}

TEST_CASE("name match: both tokens found inside a hyphenated host") {
  auto f = features::name_match_features("John Blitzer", "http://john.blitzer.com/");
  CHECK(f.has_match == true);
  CHECK(f.frac_match == 1.0);
}

TEST_CASE("name match: substring rule needs length >= 3") {
  // "bo" and "li" have length 2: the substring rule does not apply, so the
  // concatenated token "boli" matches neither
  auto f = features::name_match_features("Bo Li", "http://example.edu/~boli/");
  CHECK(f.has_match == false);
  CHECK(f.frac_match == 0.0);
  // exact token equality always counts, whatever the length
  auto g = features::name_match_features("Bo Li", "http://example.edu/people/bo/li/");
  CHECK(g.frac_match == 1.0);
}

TEST_CASE("name match: zero when nothing matches") {
  auto f = features::name_match_features("Grace Hopper", "https://news.example.org/story42");
  CHECK(f.has_match == false);
  CHECK(f.frac_match == 0.0);
}

TEST_CASE("name match rejects empty names") {
  CHECK_THROWS_AS(features::name_match_features("  ", "http://x.edu/"), InvalidInputError);
}

TEST_CASE("dictionaries: first-seen order and min_df filtering") {
  auto q = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus{
      page_of(q,
              {result(1, "http://alpha.edu/home", "welcome page", "common words here"),
               result(2, "http://beta.edu/about", "welcome again", "common words twice")},
              1)};
  features::MinDfConfig cfg{1, 1, 2, 2};
  auto dicts = features::build_dictionaries(corpus, cfg);

  // URL space keeps everything at min_df 1, in first-seen order
  CHECK(dicts.url.tokens == std::vector<std::string>{"home", "about"});
  CHECK(dicts.domain.tokens == std::vector<std::string>{"alpha", "edu", "beta"});
  // TITLE space at min_df 2 keeps only "welcome"
  CHECK(dicts.title.tokens == std::vector<std::string>{"welcome"});
  CHECK(dicts.title.doc_freq.at("welcome") == 2);
  // SNIPPET space at min_df 2 keeps "common", "words"
  CHECK(dicts.snippet.tokens == std::vector<std::string>{"common", "words"});
}

TEST_CASE("raising min_df never grows a dictionary") {
  std::mt19937_64 rng(5);
  auto q = search::build_author_query("Sam Poe");
  std::vector<features::LabeledPage> corpus;
  for (int p = 0; p < 8; ++p) {
    std::vector<search::SearchResult> results;
    for (int r = 1; r <= 5; ++r) {
      std::string word1 = "w" + std::to_string(rng() % 12);
      std::string word2 = "w" + std::to_string(rng() % 12);
      results.push_back(result(r, "http://site" + std::to_string(rng() % 6) + ".edu/" + word1,
                               word1 + " " + word2, word2 + " tail"));
    }
    corpus.push_back(page_of(q, std::move(results), 1));
  }
  int prev = -1;
  for (int min_df = 1; min_df <= 6; ++min_df) {
    auto dicts = features::build_dictionaries(corpus, min_df);
    if (prev >= 0) CHECK(dicts.term_dim() <= prev);
    prev = dicts.term_dim();
    for (const auto& [tok, freq] : dicts.snippet.doc_freq) CHECK(freq >= min_df);
  }
}

TEST_CASE("vectorize: binary terms, trailing name-match slots") {
  auto q = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus{
      page_of(q, {result(1, "http://roe.edu/~jane/", "jane roe homepage", "professor jane")}, 1)};
  auto dicts = features::build_dictionaries(corpus, 1);
  auto inst = features::vectorize(q, corpus[0].page.results[0], dicts);

  for (const auto& [idx, val] : inst.vector) {
    CHECK(idx >= 0);
    CHECK(idx < dicts.dim());
    if (idx < dicts.term_dim()) CHECK(val == 1.0);
  }
  CHECK(inst.vector.at(dicts.has_match_index()) == 1.0);
  CHECK(inst.vector.at(dicts.frac_match_index()) == 1.0);
}

TEST_CASE("vectorize: out-of-dictionary tokens are ignored") {
  auto q = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus{
      page_of(q, {result(1, "http://roe.edu/papers", "known words", "known snippet")}, 1)};
  auto dicts = features::build_dictionaries(corpus, 1);
  auto inst = features::vectorize(
      q, result(1, "http://unrelated.com/fresh", "novel phrasing entirely", "all new"), dicts);
  for (const auto& [idx, val] : inst.vector) CHECK(idx >= dicts.term_dim());
}

TEST_CASE("vectorize: title queries carry no name-match features") {
  auto tq = search::build_title_query("Some Paper Title");
  auto aq = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus{
      page_of(aq, {result(1, "http://roe.edu/~jane/")}, 1)};
  auto dicts = features::build_dictionaries(corpus, 1);
  auto inst = features::vectorize(tq, result(1, "http://roe.edu/~jane/"), dicts);
  CHECK(inst.vector.count(dicts.has_match_index()) == 0);
  CHECK(inst.vector.count(dicts.frac_match_index()) == 0);
}

TEST_CASE("ten results with one homepage yield nine pairs preferring it") {
  auto q = search::build_author_query("John Blitzer");
  std::vector<search::SearchResult> results;
  for (int r = 1; r <= 4; ++r)
    results.push_back(result(r, "http://site" + std::to_string(r) + ".com/x"));
  auto lp = page_of(q, results, 2);
  auto dicts = features::build_dictionaries({lp}, 1);

  std::vector<features::RankInstance> instances;
  for (const auto& r : lp.page.results) {
    auto inst = features::vectorize(q, r, dicts);
    inst.label = r.rank == lp.homepage_rank ? features::RankLabel::homepage
                                            : features::RankLabel::other;
    instances.push_back(std::move(inst));
  }
  auto pairs = features::build_preference_pairs(instances);
  REQUIRE(pairs.size() == 3);
  for (const auto& p : pairs) {
    CHECK(p.preferred.result_rank == 2);
    CHECK(p.other.result_rank != 2);
  }
}

TEST_CASE("pair count is always n-1 for a page of n results") {
  auto q = search::build_author_query("Pat Page");
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 12; ++n) {
    int home = 1 + static_cast<int>(rng() % n);
    std::vector<features::RankInstance> instances;
    for (int r = 1; r <= n; ++r) {
      features::RankInstance inst;
      inst.query_id = q.id;
      inst.result_rank = r;
      inst.label = r == home ? features::RankLabel::homepage : features::RankLabel::other;
      instances.push_back(std::move(inst));
    }
    CHECK(features::build_preference_pairs(instances).size() == static_cast<std::size_t>(n - 1));
  }
}

TEST_CASE("pages without exactly one homepage are rejected") {
  features::RankInstance a, b;
  a.result_rank = 1;
  b.result_rank = 2;
  SECTION("none labeled") {
    CHECK_THROWS_AS(features::build_preference_pairs({a, b}), InvalidLabelingError);
  }
  SECTION("two labeled") {
    a.label = features::RankLabel::homepage;
    b.label = features::RankLabel::homepage;
    CHECK_THROWS_AS(features::build_preference_pairs({a, b}), InvalidLabelingError);
  }
}

TEST_CASE("dictionary serialization round-trips") {
  auto q = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus{
      page_of(q,
              {result(1, "http://alpha.edu/home", "welcome page", "common words here"),
               result(2, "http://beta.edu/about", "welcome again", "common words twice")},
              1)};
  auto dicts = features::build_dictionaries(corpus, features::MinDfConfig{});
  auto restored = features::dictionaries_from_json(features::dictionaries_to_json(dicts));
  CHECK(restored.url.tokens == dicts.url.tokens);
  CHECK(restored.domain.tokens == dicts.domain.tokens);
  CHECK(restored.title.tokens == dicts.title.tokens);
  CHECK(restored.snippet.tokens == dicts.snippet.tokens);
  CHECK(restored.dim() == dicts.dim());
  CHECK(restored.snippet.doc_freq.at("common") == dicts.snippet.doc_freq.at("common"));

  // identical vectors before and after the round trip
  auto r = result(2, "http://beta.edu/about", "welcome again", "common words twice");
  auto before = features::vectorize(q, r, dicts).vector;
  auto after = features::vectorize(q, r, restored).vector;
  CHECK(before == after);
}

TEST_CASE("dictionary construction is deterministic") {
  auto q = search::build_author_query("Jane Roe");
  std::vector<features::LabeledPage> corpus;
  std::mt19937_64 rng(3);
  for (int p = 0; p < 5; ++p) {
    std::vector<search::SearchResult> results;
    for (int r = 1; r <= 6; ++r)
      results.push_back(result(r, "http://h" + std::to_string(rng() % 9) + ".edu/p" +
                                      std::to_string(rng() % 9),
                               "t" + std::to_string(rng() % 9), "s" + std::to_string(rng() % 9)));
    corpus.push_back(page_of(q, std::move(results), 1));
  }
  auto a = features::dictionaries_to_json(features::build_dictionaries(corpus, 1));
  auto b = features::dictionaries_to_json(features::build_dictionaries(corpus, 1));
  CHECK(a == b);
}
