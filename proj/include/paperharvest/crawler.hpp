#pragma once

// Depth-limited, polite BFS crawler. Seeds are depth 0; HTML within scope is
// expanded until max_depth; PDF responses are handed to a sink and never
// expanded. robots.txt Disallow prefixes are honored per host.

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "paperharvest/errors.hpp"
#include "paperharvest/hash.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::crawler {

// --- URL handling ---

struct ParsedUrl {
  std::string scheme;  // lowercased
  std::string host;    // lowercased
  int port = -1;       // -1 = none in URL
  std::string path;    // starts with "/"
  std::string query;   // without "?"
};

namespace detail {

inline bool valid_scheme(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
      return false;
  return true;
}

inline std::vector<std::string> resolve_dot_segments(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& seg : text::split(path, '/')) {
    if (seg == "." || seg.empty()) continue;
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
    } else {
      out.push_back(seg);
    }
  }
  return out;
}

inline std::string join_path(const std::vector<std::string>& segments, bool dir_like) {
  std::string p = "/";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    p += segments[i];
    if (i + 1 < segments.size()) p += "/";
  }
  if (dir_like && !segments.empty()) p += "/";
  return p;
}

}  // namespace detail

inline ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0)
    throw InvalidUrlError("parse_url: no scheme in '" + url + "'");
  ParsedUrl p;
  p.scheme = text::to_lower(url.substr(0, scheme_end));
  if (!detail::valid_scheme(p.scheme)) throw InvalidUrlError("parse_url: bad scheme in '" + url + "'");
  std::string rest = url.substr(scheme_end + 3);
  if (auto frag = rest.find('#'); frag != std::string::npos) rest = rest.substr(0, frag);

  std::string authority = rest;
  std::string path_and_query;
  if (auto slash = rest.find('/'); slash != std::string::npos) {
    authority = rest.substr(0, slash);
    path_and_query = rest.substr(slash);
  }
  if (auto q = path_and_query.find('?'); q != std::string::npos) {
    p.query = path_and_query.substr(q + 1);
    path_and_query = path_and_query.substr(0, q);
  }
  if (auto colon = authority.find(':'); colon != std::string::npos) {
    std::string port_str = authority.substr(colon + 1);
    authority = authority.substr(0, colon);
    if (port_str.empty() || port_str.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidUrlError("parse_url: bad port in '" + url + "'");
    p.port = std::stoi(port_str);
  }
  if (authority.empty()) throw InvalidUrlError("parse_url: empty host in '" + url + "'");
  p.host = text::to_lower(authority);
  p.path = path_and_query.empty() ? "/" : path_and_query;
  return p;
}

// Lowercased scheme+host, default ports stripped, fragment removed,
// dot-segments resolved, trailing "index.html" stripped.
inline std::string canonicalize_url(const std::string& url,
                                    const std::optional<std::string>& base = std::nullopt) {
  std::string absolute = url;
  if (url.find("://") == std::string::npos) {
    if (!base) throw InvalidUrlError("canonicalize_url: relative URL without base: '" + url + "'");
    ParsedUrl b = parse_url(*base);
    std::string authority = b.host + (b.port >= 0 ? ":" + std::to_string(b.port) : "");
    if (url.rfind("//", 0) == 0) {
      absolute = b.scheme + ":" + url;  // protocol-relative
    } else if (!url.empty() && url[0] == '/') {
      absolute = b.scheme + "://" + authority + url;
    } else {
      std::string dir = b.path.substr(0, b.path.rfind('/') + 1);
      absolute = b.scheme + "://" + authority + dir + url;
    }
  }
  ParsedUrl p = parse_url(absolute);
  if ((p.scheme == "http" && p.port == 80) || (p.scheme == "https" && p.port == 443)) p.port = -1;

  bool dir_like = !p.path.empty() && p.path.back() == '/';
  auto segments = detail::resolve_dot_segments(p.path);
  if (!segments.empty() && segments.back() == "index.html") {
    segments.pop_back();
    dir_like = true;
  }
  std::string canon = p.scheme + "://" + p.host;
  if (p.port >= 0) canon += ":" + std::to_string(p.port);
  canon += detail::join_path(segments, dir_like);
  if (!p.query.empty()) canon += "?" + p.query;
  return canon;
}

// Naive registrable domain: the last two host labels. Good enough for crawl
// scoping at fixture scale; multi-label public suffixes are out of scope.
inline std::string registrable_domain(const std::string& host) {
  auto labels = text::split(host, '.');
  if (labels.size() <= 2) return host;
  return labels[labels.size() - 2] + "." + labels[labels.size() - 1];
}

// href targets of anchor elements, canonicalized against base, de-duplicated,
// document order preserved. Malformed fragments are skipped.
inline std::vector<std::string> extract_links(const std::string& html, const std::string& base) {
  static const std::regex href_re(R"re(<a\s[^>]*href\s*=\s*["']([^"']*)["'])re",
                                  std::regex::icase);
  std::vector<std::string> links;
  std::set<std::string> seen;
  auto begin = std::sregex_iterator(html.begin(), html.end(), href_re);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::string target = (*it)[1].str();
    if (target.empty() || target.rfind("mailto:", 0) == 0 || target.rfind("javascript:", 0) == 0)
      continue;
    try {
      std::string canon = canonicalize_url(target, base);
      if (seen.insert(canon).second) links.push_back(std::move(canon));
    } catch (const InvalidUrlError&) {
    }
  }
  return links;
}

// --- robots.txt ---

// Minimal subset: Disallow path prefixes from the groups matching the
// configured agent token or "*".
class RobotsRules {
 public:
  static RobotsRules parse(const std::string& body, const std::string& agent) {
    RobotsRules rules;
    std::string agent_lower = text::to_lower(agent);
    bool group_applies = false;
    bool in_group_header = false;
    for (auto& raw_line : text::split(body, '\n')) {
      std::string line = raw_line;
      if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
      line = text::collapse_whitespace(line);
      if (line.empty()) continue;
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string field = text::to_lower(text::collapse_whitespace(line.substr(0, colon)));
      std::string value = text::collapse_whitespace(line.substr(colon + 1));
      if (field == "user-agent") {
        if (!in_group_header) group_applies = false;
        in_group_header = true;
        std::string v = text::to_lower(value);
        if (v == "*" || agent_lower.find(v) != std::string::npos) group_applies = true;
      } else {
        in_group_header = false;
        if (field == "disallow" && group_applies && !value.empty())
          rules.disallow_.push_back(value);
      }
    }
    return rules;
  }

  bool allowed(const std::string& path) const {
    for (const auto& prefix : disallow_)
      if (path.rfind(prefix, 0) == 0) return false;
    return true;
  }

 private:
  std::vector<std::string> disallow_;
};

// --- fetching ---

struct FetchResponse {
  int status = 0;  // 0 = network error
  std::string content_type;
  std::string body;
};

class HttpFetcher {
 public:
  virtual ~HttpFetcher() = default;
  virtual FetchResponse get(const std::string& canonical_url, int timeout_ms) = 0;
};

// In-memory site map keyed on canonical URLs; records a monotonic timestamp
// per request so politeness is assertable in tests.
class FixtureFetcher : public HttpFetcher {
 public:
  void add_page(const std::string& url, std::string content_type, std::string body) {
    pages_[canonicalize_url(url)] = {std::move(content_type), std::move(body)};
  }

  FetchResponse get(const std::string& canonical_url, int /*timeout_ms*/) override {
    request_log_.push_back({canonical_url, now_ms()});
    auto it = pages_.find(canonical_url);
    if (it == pages_.end()) return {404, "text/plain", ""};
    return {200, it->second.first, it->second.second};
  }

  struct RequestEntry {
    std::string url;
    std::int64_t at_ms;
  };
  const std::vector<RequestEntry>& request_log() const { return request_log_; }

 private:
  static std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }

  std::map<std::string, std::pair<std::string, std::string>> pages_;
  std::vector<RequestEntry> request_log_;
};

// --- the crawl itself ---

enum class CrawlScope { same_registrable_domain_html, unrestricted };

struct Politeness {
  int per_host_delay_ms = 1000;
  int max_pages = 500;  // per seed
  bool obey_robots = true;
};

struct CrawlJob {
  std::vector<std::string> seeds;
  int max_depth = 2;  // seed = depth 0
  CrawlScope scope = CrawlScope::same_registrable_domain_html;
  Politeness politeness;
  int fetch_timeout_ms = 10000;
  std::string user_agent = "paperharvest-crawler (+contact: see project README)";
};

enum class FetchStatus { fetched_html, fetched_pdf, skipped_robots, skipped_scope, error };

inline const char* fetch_status_name(FetchStatus s) {
  switch (s) {
    case FetchStatus::fetched_html: return "fetched_html";
    case FetchStatus::fetched_pdf: return "fetched_pdf";
    case FetchStatus::skipped_robots: return "skipped_robots";
    case FetchStatus::skipped_scope: return "skipped_scope";
    case FetchStatus::error: return "error";
  }
  return "?";
}

struct FetchRecord {
  std::string url;  // canonical
  int depth = 0;
  std::string seed;  // canonical seed this URL was reached from
  FetchStatus status = FetchStatus::error;
  std::optional<int> http_status;
  std::string content_hash;  // set for fetched_pdf
  std::optional<std::string> stored_path;
};

// Receives PDF bodies; returns (content_hash, stored_path).
using PdfSink = std::function<std::pair<std::string, std::string>(const std::string& url,
                                                                  const std::string& body)>;

namespace detail {

inline bool path_is_pdf(const std::string& canonical_url) {
  ParsedUrl p = parse_url(canonical_url);
  return p.path.size() >= 4 && text::to_lower(p.path.substr(p.path.size() - 4)) == ".pdf";
}

inline bool is_pdf_response(const std::string& canonical_url, const std::string& content_type) {
  return text::starts_with_ci(content_type, "application/pdf") || path_is_pdf(canonical_url);
}

class HostThrottle {
 public:
  explicit HostThrottle(int delay_ms) : delay_ms_(delay_ms) {}

  void wait_for(const std::string& host) {
    if (delay_ms_ <= 0) return;
    auto now = std::chrono::steady_clock::now();
    auto it = last_.find(host);
    if (it != last_.end()) {
      auto earliest = it->second + std::chrono::milliseconds(delay_ms_);
      if (now < earliest) {
        std::this_thread::sleep_for(earliest - now);
        now = std::chrono::steady_clock::now();
      }
    }
    last_[host] = now;
  }

 private:
  int delay_ms_;
  std::map<std::string, std::chrono::steady_clock::time_point> last_;
};

}  // namespace detail

// BFS from each seed over a shared visited set. Every touched URL yields
// exactly one FetchRecord; per-URL failures never abort the job.
inline std::vector<FetchRecord> crawl(const CrawlJob& job, HttpFetcher& fetcher,
                                      const PdfSink& pdf_sink = {}) {
  if (job.max_depth < 0) throw InvalidInputError("crawl: max_depth must be >= 0");

  std::vector<std::pair<std::string, std::string>> seeds;  // (canonical, registrable domain)
  for (const auto& s : job.seeds) {
    try {
      std::string canon = canonicalize_url(s);
      seeds.emplace_back(canon, registrable_domain(parse_url(canon).host));
    } catch (const InvalidUrlError&) {
    }
  }
  if (seeds.empty()) throw InvalidInputError("crawl: no valid seeds");

  std::vector<FetchRecord> records;
  std::set<std::string> visited;
  std::map<std::string, RobotsRules> robots_cache;
  detail::HostThrottle throttle(job.politeness.per_host_delay_ms);

  auto robots_for = [&](const std::string& scheme, const std::string& host) -> const RobotsRules& {
    auto it = robots_cache.find(host);
    if (it != robots_cache.end()) return it->second;
    RobotsRules rules;
    if (job.politeness.obey_robots) {
      throttle.wait_for(host);
      FetchResponse resp = fetcher.get(scheme + "://" + host + "/robots.txt", job.fetch_timeout_ms);
      if (resp.status == 200) rules = RobotsRules::parse(resp.body, job.user_agent);
    }
    return robots_cache.emplace(host, std::move(rules)).first->second;
  };

  for (const auto& [seed, seed_domain] : seeds) {
    int pages_fetched = 0;
    std::deque<std::pair<std::string, int>> frontier;  // (canonical url, depth), BFS order
    if (visited.insert(seed).second) frontier.emplace_back(seed, 0);

    while (!frontier.empty()) {
      auto [url, depth] = frontier.front();
      frontier.pop_front();

      FetchRecord rec;
      rec.url = url;
      rec.depth = depth;
      rec.seed = seed;

      ParsedUrl parsed;
      try {
        parsed = parse_url(url);
      } catch (const InvalidUrlError&) {
        rec.status = FetchStatus::error;
        records.push_back(std::move(rec));
        continue;
      }

      bool looks_pdf = detail::path_is_pdf(url);
      bool in_scope = job.scope == CrawlScope::unrestricted ||
                      registrable_domain(parsed.host) == seed_domain;
      // documents download cross-domain; off-scope HTML is not even fetched
      if (!in_scope && !looks_pdf) {
        rec.status = FetchStatus::skipped_scope;
        records.push_back(std::move(rec));
        continue;
      }
      if (job.politeness.obey_robots && !robots_for(parsed.scheme, parsed.host).allowed(parsed.path)) {
        rec.status = FetchStatus::skipped_robots;
        records.push_back(std::move(rec));
        continue;
      }
      if (pages_fetched >= job.politeness.max_pages) {
        rec.status = FetchStatus::error;
        records.push_back(std::move(rec));
        continue;
      }

      throttle.wait_for(parsed.host);
      FetchResponse resp = fetcher.get(url, job.fetch_timeout_ms);
      ++pages_fetched;
      rec.http_status = resp.status;
      if (resp.status != 200) {
        rec.status = FetchStatus::error;
        records.push_back(std::move(rec));
        continue;
      }

      if (detail::is_pdf_response(url, resp.content_type)) {
        rec.status = FetchStatus::fetched_pdf;
        rec.content_hash = hash::sha256_hex(resp.body);
        if (pdf_sink) {
          auto [hash_hex, path] = pdf_sink(url, resp.body);
          rec.content_hash = hash_hex;
          rec.stored_path = path;
        } else {
          rec.stored_path = std::string();  // fetched but not persisted
        }
        records.push_back(std::move(rec));
        continue;  // documents are never expanded
      }

      rec.status = FetchStatus::fetched_html;
      records.push_back(std::move(rec));
      if (depth < job.max_depth) {
        for (const auto& link : extract_links(resp.body, url)) {
          if (visited.insert(link).second) frontier.emplace_back(link, depth + 1);
        }
      }
    }
  }
  return records;
}

}  // namespace paperharvest::crawler
