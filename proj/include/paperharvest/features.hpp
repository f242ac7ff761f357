#pragma once

// Feature extraction for homepage ranking: URL/DOMAIN/TITLE/SNIPPET term
// dictionaries, the two name-match features, and preference-pair construction.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "paperharvest/errors.hpp"
#include "paperharvest/search.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::features {

enum class FeatureSpace { url, domain, title, snippet };

inline const char* space_name(FeatureSpace s) {
  switch (s) {
    case FeatureSpace::url: return "URL";
    case FeatureSpace::domain: return "DOMAIN";
    case FeatureSpace::title: return "TITLE";
    case FeatureSpace::snippet: return "SNIPPET";
  }
  return "?";
}

struct UrlTokens {
  std::vector<std::string> domain;  // host labels, lowercased
  std::vector<std::string> path;    // path segments, lowercased, "~" stripped
};

// Splits a URL into host labels (on ".") and path segments (on "/").
// The scheme is dropped; empty tokens are dropped; a leading "~" on a path
// segment is stripped so that "~soumen" matches the name token "soumen".
inline UrlTokens tokenize_url(const std::string& url) {
  std::string rest = url;
  if (auto pos = rest.find("://"); pos != std::string::npos) rest = rest.substr(pos + 3);
  // stop at query/fragment
  if (auto pos = rest.find_first_of("?#"); pos != std::string::npos) rest = rest.substr(0, pos);
  std::string host = rest;
  std::string path;
  if (auto slash = rest.find('/'); slash != std::string::npos) {
    host = rest.substr(0, slash);
    path = rest.substr(slash + 1);
  }
  if (auto colon = host.find(':'); colon != std::string::npos) host = host.substr(0, colon);
  if (host.empty()) throw InvalidUrlError("tokenize_url: no host in '" + url + "'");

  UrlTokens out;
  for (auto& label : text::split(text::to_lower(host), '.'))
    if (!label.empty()) out.domain.push_back(std::move(label));
  if (out.domain.empty()) throw InvalidUrlError("tokenize_url: empty host in '" + url + "'");
  for (auto& seg : text::split(text::to_lower(path), '/')) {
    if (!seg.empty() && seg.front() == '~') seg.erase(seg.begin());
    if (!seg.empty()) out.path.push_back(std::move(seg));
  }
  return out;
}

struct NameMatchFeatures {
  bool has_match = false;
  double frac_match = 0.0;  // matched name tokens / total name tokens
};

// A name token matches a URL token when it equals it, or when it is a
// substring of length >= 3 of it ("nina" inside "ninan", "blitzer" inside
// "john-blitzer"). Matching runs over host labels and path segments alike.
inline NameMatchFeatures name_match_features(const std::string& author_name,
                                             const std::string& url) {
  auto name_tokens = text::tokenize(author_name);
  if (name_tokens.empty()) throw InvalidInputError("name_match_features: empty author name");
  UrlTokens url_tokens = tokenize_url(url);
  std::vector<std::string> all;
  all.insert(all.end(), url_tokens.domain.begin(), url_tokens.domain.end());
  all.insert(all.end(), url_tokens.path.begin(), url_tokens.path.end());

  std::size_t matched = 0;
  for (const auto& nt : name_tokens) {
    bool hit = false;
    for (const auto& ut : all) {
      if (nt == ut || (nt.size() >= 3 && ut.find(nt) != std::string::npos)) {
        hit = true;
        break;
      }
    }
    if (hit) ++matched;
  }
  NameMatchFeatures f;
  f.frac_match = static_cast<double>(matched) / static_cast<double>(name_tokens.size());
  f.has_match = f.frac_match > 0.0;
  return f;
}

struct FeatureDictionary {
  FeatureSpace space = FeatureSpace::url;
  int min_df = 1;
  std::vector<std::string> tokens;                       // index = position
  std::unordered_map<std::string, int> token_to_index;
  std::unordered_map<std::string, int> doc_freq;         // retained tokens only

  int size() const { return static_cast<int>(tokens.size()); }

  int index_of(const std::string& token) const {
    auto it = token_to_index.find(token);
    return it == token_to_index.end() ? -1 : it->second;
  }
};

struct DictionarySet {
  FeatureDictionary url, domain, title, snippet;

  const FeatureDictionary& at(FeatureSpace s) const {
    switch (s) {
      case FeatureSpace::url: return url;
      case FeatureSpace::domain: return domain;
      case FeatureSpace::title: return title;
      case FeatureSpace::snippet: return snippet;
    }
    throw InvalidInputError("bad feature space");
  }

  // Term features first (URL, DOMAIN, TITLE, SNIPPET), then hasMatch and
  // fracMatch at the two fixed trailing indices.
  int term_dim() const { return url.size() + domain.size() + title.size() + snippet.size(); }
  int dim() const { return term_dim() + 2; }
  int has_match_index() const { return term_dim(); }
  int frac_match_index() const { return term_dim() + 1; }

  int offset(FeatureSpace s) const {
    switch (s) {
      case FeatureSpace::url: return 0;
      case FeatureSpace::domain: return url.size();
      case FeatureSpace::title: return url.size() + domain.size();
      case FeatureSpace::snippet: return url.size() + domain.size() + title.size();
    }
    throw InvalidInputError("bad feature space");
  }
};

struct MinDfConfig {
  int url = 1;
  int domain = 1;
  int title = 2;
  int snippet = 2;
};

enum class RankLabel { homepage, other };

struct RankInstance {
  std::string query_id;
  int result_rank = 0;
  std::map<int, double> vector;  // sparse, ordered for reproducible iteration
  RankLabel label = RankLabel::other;
};

struct PreferencePair {
  std::string query_id;
  RankInstance preferred;  // the labeled homepage
  RankInstance other;
};

// A result page with the rank of its one true homepage (training data).
struct LabeledPage {
  search::ResultPage page;
  int homepage_rank = 0;
};

namespace detail {

struct TokenCounter {
  std::vector<std::string> order;
  std::unordered_map<std::string, int> df;

  void add(const std::vector<std::string>& doc_tokens) {
    std::unordered_set<std::string> seen;
    for (const auto& t : doc_tokens) {
      if (!seen.insert(t).second) continue;
      auto [it, fresh] = df.emplace(t, 0);
      if (fresh) order.push_back(t);
      ++it->second;
    }
  }

  FeatureDictionary build(FeatureSpace space, int min_df) const {
    FeatureDictionary dict;
    dict.space = space;
    dict.min_df = min_df;
    for (const auto& t : order) {
      int freq = df.at(t);
      if (freq < min_df) continue;
      dict.token_to_index.emplace(t, dict.size());
      dict.tokens.push_back(t);
      dict.doc_freq.emplace(t, freq);
    }
    return dict;
  }
};

}  // namespace detail

// Document frequency counts one occurrence per search result. Index order is
// first-seen order over the corpus, which makes construction deterministic.
inline DictionarySet build_dictionaries(const std::vector<LabeledPage>& training_pages,
                                        const MinDfConfig& min_df = {}) {
  if (training_pages.empty()) throw InvalidInputError("build_dictionaries: empty corpus");
  detail::TokenCounter url_c, domain_c, title_c, snippet_c;
  for (const auto& lp : training_pages) {
    for (const auto& r : lp.page.results) {
      UrlTokens ut;
      try {
        ut = tokenize_url(r.url);
      } catch (const InvalidUrlError&) {
        continue;
      }
      url_c.add(ut.path);
      domain_c.add(ut.domain);
      title_c.add(text::tokenize(r.page_title));
      snippet_c.add(text::tokenize(r.snippet));
    }
  }
  DictionarySet dicts;
  dicts.url = url_c.build(FeatureSpace::url, min_df.url);
  dicts.domain = domain_c.build(FeatureSpace::domain, min_df.domain);
  dicts.title = title_c.build(FeatureSpace::title, min_df.title);
  dicts.snippet = snippet_c.build(FeatureSpace::snippet, min_df.snippet);
  return dicts;
}

inline DictionarySet build_dictionaries(const std::vector<LabeledPage>& training_pages,
                                        int min_df_all) {
  MinDfConfig cfg{min_df_all, min_df_all, min_df_all, min_df_all};
  return build_dictionaries(training_pages, cfg);
}

// Binary term presence per dictionary plus the two name-match features.
// Out-of-dictionary tokens are ignored.
inline RankInstance vectorize(const search::Query& query, const search::SearchResult& result,
                              const DictionarySet& dicts) {
  RankInstance inst;
  inst.query_id = query.id;
  inst.result_rank = result.rank;

  auto set_terms = [&](FeatureSpace space, const std::vector<std::string>& tokens) {
    const auto& dict = dicts.at(space);
    int base = dicts.offset(space);
    for (const auto& t : tokens) {
      int idx = dict.index_of(t);
      if (idx >= 0) inst.vector[base + idx] = 1.0;
    }
  };

  try {
    UrlTokens ut = tokenize_url(result.url);
    set_terms(FeatureSpace::url, ut.path);
    set_terms(FeatureSpace::domain, ut.domain);
  } catch (const InvalidUrlError&) {
    // unusable URL: term features stay zero, name match stays zero
  }
  set_terms(FeatureSpace::title, text::tokenize(result.page_title));
  set_terms(FeatureSpace::snippet, text::tokenize(result.snippet));

  if (query.kind == search::QueryKind::author) {
    try {
      NameMatchFeatures nm = name_match_features(query.raw_text, result.url);
      if (nm.has_match) inst.vector[dicts.has_match_index()] = 1.0;
      if (nm.frac_match > 0.0) inst.vector[dicts.frac_match_index()] = nm.frac_match;
    } catch (const InvalidUrlError&) {
    }
  }
  return inst;
}

// One pair per non-homepage result, each preferring the homepage. No pairs
// are formed among the non-homepages.
inline std::vector<PreferencePair> build_preference_pairs(const std::vector<RankInstance>& page) {
  const RankInstance* positive = nullptr;
  for (const auto& inst : page) {
    if (inst.label != RankLabel::homepage) continue;
    if (positive) throw InvalidLabelingError("preference pairs: multiple homepages for query " +
                                             inst.query_id);
    positive = &inst;
  }
  if (!positive) throw InvalidLabelingError("preference pairs: no homepage label");
  std::vector<PreferencePair> pairs;
  for (const auto& inst : page) {
    if (&inst == positive) continue;
    pairs.push_back({positive->query_id, *positive, inst});
  }
  return pairs;
}

// --- serialization: {space: {"min_df": int, "tokens": [...]}} ---

inline nlohmann::json dictionaries_to_json(const DictionarySet& dicts) {
  nlohmann::json j;
  auto emit = [&](const FeatureDictionary& d) {
    nlohmann::json dj;
    dj["min_df"] = d.min_df;
    dj["tokens"] = d.tokens;
    nlohmann::json freqs = nlohmann::json::array();
    for (const auto& t : d.tokens) freqs.push_back(d.doc_freq.at(t));
    dj["doc_freq"] = freqs;
    j[space_name(d.space)] = std::move(dj);
  };
  emit(dicts.url);
  emit(dicts.domain);
  emit(dicts.title);
  emit(dicts.snippet);
  return j;
}

inline DictionarySet dictionaries_from_json(const nlohmann::json& j) {
  DictionarySet dicts;
  auto read = [&](FeatureSpace space, FeatureDictionary& d) {
    const auto& dj = j.at(space_name(space));
    d.space = space;
    d.min_df = dj.at("min_df").get<int>();
    d.tokens = dj.at("tokens").get<std::vector<std::string>>();
    std::vector<int> freqs;
    if (dj.contains("doc_freq")) freqs = dj.at("doc_freq").get<std::vector<int>>();
    for (int i = 0; i < d.size(); ++i) {
      d.token_to_index.emplace(d.tokens[i], i);
      d.doc_freq.emplace(d.tokens[i], i < static_cast<int>(freqs.size()) ? freqs[i] : d.min_df);
    }
    return d;
  };
  read(FeatureSpace::url, dicts.url);
  read(FeatureSpace::domain, dicts.domain);
  read(FeatureSpace::title, dicts.title);
  read(FeatureSpace::snippet, dicts.snippet);
  return dicts;
}

}  // namespace paperharvest::features
