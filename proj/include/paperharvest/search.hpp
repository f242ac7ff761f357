#pragma once

// Query construction and execution against a pluggable search backend.
// Two backends ship: a replayable line-oriented fixture file and a generic
// HTTP JSON endpoint. Fixture lookups key on the rendered query string.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "paperharvest/errors.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::search {

enum class QueryKind { title, author };

inline constexpr int kDefaultTopK = 10;

struct Query {
  std::string id;
  QueryKind kind = QueryKind::title;
  std::string raw_text;   // whitespace-collapsed
  std::string rendered;   // quoted, plus filetype directive
  int top_k = kDefaultTopK;
};

struct SearchResult {
  std::string query_id;
  int rank = 0;  // 1-based, contiguous within a page
  std::string url;
  std::string page_title;
  std::string snippet;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

struct ResultPage {
  Query query;
  std::vector<SearchResult> results;  // sorted ascending by rank
  std::int64_t retrieved_at_ms = 0;
};

inline Query build_title_query(const std::string& title, int top_k = kDefaultTopK) {
  std::string clean = text::collapse_whitespace(title);
  if (clean.empty()) throw InvalidInputError("title query: empty title");
  Query q;
  q.id = "title:" + clean;
  q.kind = QueryKind::title;
  q.raw_text = clean;
  q.rendered = "\"" + clean + "\" filetype:pdf";
  q.top_k = top_k;
  return q;
}

inline Query build_author_query(const std::string& name, int top_k = kDefaultTopK) {
  std::string clean = text::collapse_whitespace(name);
  if (clean.empty()) throw InvalidInputError("author query: empty name");
  bool has_alpha = std::any_of(clean.begin(), clean.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
  if (!has_alpha) throw InvalidInputError("author query: no alphabetic token in '" + clean + "'");
  Query q;
  q.id = "author:" + clean;
  q.kind = QueryKind::author;
  q.raw_text = clean;
  q.rendered = "\"" + clean + "\" filetype:html";
  q.top_k = top_k;
  return q;
}

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  // Returns results for the rendered query, already ranked from 1.
  virtual std::vector<SearchResult> run(const Query& query) = 0;
};

// Token bucket shared across worker threads.
class RateLimiter {
 public:
  explicit RateLimiter(double queries_per_second = 3.0)
      : interval_ms_(queries_per_second > 0 ? 1000.0 / queries_per_second : 0.0) {}

  void acquire() {
    if (interval_ms_ <= 0) return;
    std::unique_lock lock(mu_);
    auto now = std::chrono::steady_clock::now();
    auto earliest = last_ + std::chrono::milliseconds(static_cast<std::int64_t>(interval_ms_));
    if (now < earliest) {
      std::this_thread::sleep_for(earliest - now);
      now = std::chrono::steady_clock::now();
    }
    last_ = now;
  }

 private:
  double interval_ms_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point last_{};
};

namespace detail {

inline void validate_page(const ResultPage& page) {
  std::set<int> ranks;
  for (const auto& r : page.results) {
    if (r.url.empty()) throw InvalidInputError("result page: empty url at rank " + std::to_string(r.rank));
    if (!ranks.insert(r.rank).second)
      throw InvalidInputError("result page: duplicate rank " + std::to_string(r.rank));
  }
  int expect = 1;
  for (int r : ranks) {
    if (r != expect++)
      throw InvalidInputError("result page: ranks not contiguous from 1");
  }
}

}  // namespace detail

// Replayable fixture: one JSON object per line,
//   {"q": rendered query, "results": [{"rank","url","title","snippet"}]}
// Duplicate keys: last line wins.
class FixtureBackend : public SearchBackend {
 public:
  FixtureBackend() = default;

  static FixtureBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("fixture backend: cannot open " + path);
    FixtureBackend backend;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
      std::vector<SearchResult> results;
      for (const auto& r : j.at("results")) {
        SearchResult sr;
        sr.rank = r.at("rank").get<int>();
        sr.url = r.at("url").get<std::string>();
        sr.page_title = r.value("title", "");
        sr.snippet = r.value("snippet", "");
        results.push_back(std::move(sr));
      }
      backend.entries_[j.at("q").get<std::string>()] = std::move(results);
    }
    return backend;
  }

  std::vector<SearchResult> run(const Query& query) override {
    auto it = entries_.find(query.rendered);
    if (it == entries_.end())
      throw NotFoundError("fixture backend: no entry for " + query.rendered);
    return it->second;
  }

  bool contains(const std::string& rendered) const { return entries_.count(rendered) > 0; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<SearchResult>> entries_;
};

struct LiveBackendConfig {
  std::string endpoint;     // e.g. https://search.example.com/api
  std::string credential;   // sent as Authorization: Bearer <credential>
  int timeout_ms = 10000;
  int max_retries = 3;
  double queries_per_second = 3.0;
};

// Generic HTTP adapter: one GET per query, response JSON
//   {"results": [{"rank","url","title","snippet"}]}
// Provider-specific response schemas belong in front of this contract,
// not inside the core.
class LiveBackend : public SearchBackend {
 public:
  // transport: (url_path_and_query, timeout_ms) -> (http_status, body)
  using Transport = std::function<std::pair<int, std::string>(const std::string&, int)>;

  LiveBackend(LiveBackendConfig config, Transport transport)
      : config_(std::move(config)),
        transport_(std::move(transport)),
        limiter_(config_.queries_per_second) {}

  std::vector<SearchResult> run(const Query& query) override {
    limiter_.acquire();
    std::string request = config_.endpoint + "?q=" + url_encode(query.rendered) +
                          "&count=" + std::to_string(query.top_k);
    int last_status = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
      auto [status, body] = transport_(request, config_.timeout_ms);
      last_status = status;
      if (status == 429) continue;                   // transient: throttled upstream
      if (status >= 500 || status == 0) continue;    // transient: server/network
      if (status != 200) break;
      return parse_body(body, query);
    }
    if (last_status == 429)
      throw ThrottledError("live backend: rate limit exceeded for " + query.rendered);
    throw BackendError("live backend: request failed for " + query.rendered, last_status);
  }

  static std::string url_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
      if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
        out.push_back(static_cast<char>(c));
      } else {
        out.push_back('%');
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0xF]);
      }
    }
    return out;
  }

 private:
  std::vector<SearchResult> parse_body(const std::string& body, const Query& query) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("live backend: bad response body: ") + e.what(), 200);
    }
    std::vector<SearchResult> results;
    int rank = 1;
    for (const auto& r : j.at("results")) {
      SearchResult sr;
      sr.rank = r.value("rank", rank);
      sr.url = r.at("url").get<std::string>();
      sr.page_title = r.value("title", "");
      sr.snippet = r.value("snippet", "");
      results.push_back(std::move(sr));
      ++rank;
    }
    return results;
  }

  LiveBackendConfig config_;
  Transport transport_;
  RateLimiter limiter_;
};

// Runs a query and normalizes the backend's answer: truncate to top_k,
// re-rank contiguously from 1, stamp query_id and retrieval time.
inline ResultPage execute(const Query& query, SearchBackend& backend) {
  ResultPage page;
  page.query = query;
  auto results = backend.run(query);
  if (results.size() > static_cast<std::size_t>(query.top_k))
    results.resize(static_cast<std::size_t>(query.top_k));
  int rank = 1;
  for (auto& r : results) {
    r.query_id = query.id;
    r.rank = rank++;
  }
  page.results = std::move(results);
  page.retrieved_at_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
  detail::validate_page(page);
  return page;
}

// Appends one fixture line for the page's query. Re-recording the same query
// is resolved at load time: the last line wins.
inline void record_fixture(const Query& query, const ResultPage& page, const std::string& path) {
  detail::validate_page(page);
  nlohmann::json j;
  j["q"] = query.rendered;
  auto& arr = j["results"] = nlohmann::json::array();
  for (const auto& r : page.results) {
    arr.push_back({{"rank", r.rank}, {"url", r.url}, {"title", r.page_title}, {"snippet", r.snippet}});
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("record_fixture: cannot open " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("record_fixture: write failed on " + path);
}

}  // namespace paperharvest::search
