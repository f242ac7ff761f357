#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "paperharvest/search.hpp"

using namespace paperharvest;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  TempFile() {
    path = fs::temp_directory_path() /
           ("ph_search_" + std::to_string(std::random_device{}()) + ".jsonl");
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

search::ResultPage make_page(const search::Query& q, int n) {
  search::ResultPage page;
  page.query = q;
  for (int r = 1; r <= n; ++r) {
    search::SearchResult sr;
    sr.query_id = q.id;
    sr.rank = r;
    sr.url = "http://example.edu/r" + std::to_string(r);
    sr.page_title = "title " + std::to_string(r);
    sr.snippet = "snippet " + std::to_string(r);
    page.results.push_back(std::move(sr));
  }
  return page;
}

}  // namespace

TEST_CASE("title query rendering quotes and adds the pdf filter") {
  auto q = search::build_title_query("Maximum Satisfiability of Formulas with Bounded Variables");
  CHECK(q.rendered == "\"Maximum Satisfiability of Formulas with Bounded Variables\" filetype:pdf");
  CHECK(q.kind == search::QueryKind::title);
  CHECK(q.top_k == 10);
}

TEST_CASE("title query collapses internal whitespace") {
  auto q = search::build_title_query("  Deep   Learning\tfor\nText  ");
  CHECK(q.raw_text == "Deep Learning for Text");
  CHECK(q.rendered == "\"Deep Learning for Text\" filetype:pdf");
}

TEST_CASE("author query rendering uses the html filter") {
  auto q = search::build_author_query("John Blitzer");
  CHECK(q.rendered == "\"John Blitzer\" filetype:html");
  CHECK(q.kind == search::QueryKind::author);
}

TEST_CASE("blank queries are rejected") {
  CHECK_THROWS_AS(search::build_title_query("   "), InvalidInputError);
  CHECK_THROWS_AS(search::build_title_query(""), InvalidInputError);
  CHECK_THROWS_AS(search::build_author_query(" \t "), InvalidInputError);
  CHECK_THROWS_AS(search::build_author_query("1234 5678"), InvalidInputError);
}

TEST_CASE("record then load reproduces a page exactly") {
  TempFile f;
  auto q = search::build_author_query("Ada Lovelace", 5);
  auto page = make_page(q, 5);
  search::record_fixture(q, page, f.path.string());

  auto backend = search::FixtureBackend::load(f.path.string());
  auto replayed = search::execute(q, backend);
  REQUIRE(replayed.results.size() == page.results.size());
  for (std::size_t i = 0; i < page.results.size(); ++i) CHECK(replayed.results[i] == page.results[i]);
}

TEST_CASE("round trip survives many random pages") {
  TempFile f;
  std::mt19937_64 rng(99);
  std::vector<std::pair<search::Query, search::ResultPage>> recorded;
  for (int i = 0; i < 25; ++i) {
    auto q = search::build_title_query("paper number " + std::to_string(i),
                                       1 + static_cast<int>(rng() % 10));
    auto page = make_page(q, q.top_k);
    search::record_fixture(q, page, f.path.string());
    recorded.emplace_back(q, page);
  }
  auto backend = search::FixtureBackend::load(f.path.string());
  REQUIRE(backend.size() == recorded.size());
  for (auto& [q, page] : recorded) {
    auto replayed = search::execute(q, backend);
    CHECK(replayed.results == page.results);
  }
}

TEST_CASE("re-recording a query: the last line wins") {
  TempFile f;
  auto q = search::build_title_query("duplicated");
  search::record_fixture(q, make_page(q, 3), f.path.string());
  auto second = make_page(q, 2);
  second.results[0].url = "http://example.edu/updated";
  search::record_fixture(q, second, f.path.string());

  auto backend = search::FixtureBackend::load(f.path.string());
  auto page = search::execute(q, backend);
  REQUIRE(page.results.size() == 2);
  CHECK(page.results[0].url == "http://example.edu/updated");
}

TEST_CASE("execute truncates to top_k and re-ranks from 1") {
  auto q10 = search::build_title_query("long tail", 10);
  TempFile f;
  search::record_fixture(q10, make_page(q10, 10), f.path.string());
  auto backend = search::FixtureBackend::load(f.path.string());

  auto q3 = search::build_title_query("long tail", 3);
  auto page = search::execute(q3, backend);
  REQUIRE(page.results.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(page.results[static_cast<std::size_t>(i)].rank == i + 1);
    CHECK(page.results[static_cast<std::size_t>(i)].query_id == q3.id);
  }
}

TEST_CASE("unknown query raises NotFoundError") {
  TempFile f;
  { std::ofstream touch(f.path); }
  auto backend = search::FixtureBackend::load(f.path.string());
  auto q = search::build_title_query("never recorded");
  CHECK_THROWS_AS(search::execute(q, backend), NotFoundError);
}

TEST_CASE("malformed pages are rejected at validation") {
  auto q = search::build_title_query("bad page");
  auto page = make_page(q, 3);
  SECTION("duplicate rank") {
    page.results[2].rank = 2;
    CHECK_THROWS_AS(search::detail::validate_page(page), InvalidInputError);
  }
  SECTION("gap in ranks") {
    page.results[2].rank = 5;
    CHECK_THROWS_AS(search::detail::validate_page(page), InvalidInputError);
  }
  SECTION("empty url") {
    page.results[1].url = "";
    CHECK_THROWS_AS(search::detail::validate_page(page), InvalidInputError);
  }
}

TEST_CASE("live backend retries transient failures then succeeds") {
  search::LiveBackendConfig cfg;
  cfg.endpoint = "https://api.test/search";
  cfg.max_retries = 3;
  cfg.queries_per_second = 0;  // no pacing in tests
  int calls = 0;
  search::LiveBackend backend(cfg, [&](const std::string& url, int) {
    ++calls;
    CHECK(url.find("q=%22hello%20world%22%20filetype%3Apdf") != std::string::npos);
    if (calls < 3) return std::make_pair(500, std::string{});
    return std::make_pair(
        200, std::string(R"({"results":[{"rank":1,"url":"http://a.edu/x.pdf","title":"t","snippet":"s"}]})"));
  });
  auto q = search::build_title_query("hello world");
  auto page = search::execute(q, backend);
  CHECK(calls == 3);
  REQUIRE(page.results.size() == 1);
  CHECK(page.results[0].url == "http://a.edu/x.pdf");
}

TEST_CASE("live backend maps persistent 429 to ThrottledError") {
  search::LiveBackendConfig cfg;
  cfg.endpoint = "https://api.test/search";
  cfg.max_retries = 1;
  cfg.queries_per_second = 0;
  search::LiveBackend backend(cfg, [](const std::string&, int) {
    return std::make_pair(429, std::string{});
  });
  auto q = search::build_title_query("throttled");
  CHECK_THROWS_AS(backend.run(q), ThrottledError);
}

TEST_CASE("live backend maps hard failures to BackendError with status") {
  search::LiveBackendConfig cfg;
  cfg.endpoint = "https://api.test/search";
  cfg.max_retries = 0;
  cfg.queries_per_second = 0;
  search::LiveBackend backend(cfg, [](const std::string&, int) {
    return std::make_pair(403, std::string{});
  });
  auto q = search::build_title_query("forbidden");
  try {
    backend.run(q);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.http_status == 403);
  }
}
