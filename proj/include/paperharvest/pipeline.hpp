#pragma once

// End-to-end orchestration of the two acquisition flows, plus training,
// cross-validation, and evaluation entry points shared by the CLI and tests.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "paperharvest/crawler.hpp"
#include "paperharvest/doc.hpp"
#include "paperharvest/docstore.hpp"
#include "paperharvest/errors.hpp"
#include "paperharvest/features.hpp"
#include "paperharvest/fixtures.hpp"
#include "paperharvest/forest.hpp"
#include "paperharvest/ltr.hpp"
#include "paperharvest/search.hpp"

namespace paperharvest::pipeline {

// --- configuration ---

// One INI-style key-value document. Sections become "section.key" entries;
// '#' and ';' start comments. Every key is overridable on the command line.
inline std::map<std::string, std::string> parse_config_text(const std::string& body) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::size_t lineno = 0;
  for (const auto& raw : text::split(body, '\n')) {
    ++lineno;
    std::string line = raw;
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line = line.substr(0, pos);
    line = text::collapse_whitespace(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config line " + std::to_string(lineno) + ": unterminated section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = text::collapse_whitespace(line.substr(0, eq));
    std::string value = text::collapse_whitespace(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    kv[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

struct PipelineConfig {
  // search
  std::string backend = "fixture";  // fixture | live
  std::string search_fixture;
  search::LiveBackendConfig live;
  int top_k = 10;
  // models
  std::string ranker_model;
  std::string dictionaries;
  std::string classifier_model;
  // crawl
  int max_depth = 2;
  int per_host_delay_ms = 0;  // fixtures need no pacing; live runs set this
  int max_pages = 500;
  bool obey_robots = true;
  std::string site_map;  // fixture fetcher source
  // store / pipeline
  std::string store_root;
  std::uint64_t seed = 7;
  std::vector<std::string> excluded_domains;
  std::string targets;  // known-work list for recovery accounting
};

inline PipelineConfig config_from_map(const std::map<std::string, std::string>& kv) {
  PipelineConfig c;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto get_int = [&](const char* key, int fallback) {
    auto v = get(key);
    return v ? std::stoi(*v) : fallback;
  };
  if (auto v = get("search.backend")) c.backend = *v;
  if (auto v = get("search.fixture")) c.search_fixture = *v;
  if (auto v = get("search.endpoint")) c.live.endpoint = *v;
  if (auto v = get("search.credential")) c.live.credential = *v;
  c.live.timeout_ms = get_int("search.timeout_ms", c.live.timeout_ms);
  c.live.max_retries = get_int("search.max_retries", c.live.max_retries);
  if (auto v = get("search.queries_per_second")) c.live.queries_per_second = std::stod(*v);
  c.top_k = get_int("search.top_k", c.top_k);
  if (auto v = get("models.ranker")) c.ranker_model = *v;
  if (auto v = get("models.dictionaries")) c.dictionaries = *v;
  if (auto v = get("models.classifier")) c.classifier_model = *v;
  c.max_depth = get_int("crawl.max_depth", c.max_depth);
  c.per_host_delay_ms = get_int("crawl.per_host_delay_ms", c.per_host_delay_ms);
  c.max_pages = get_int("crawl.max_pages", c.max_pages);
  if (auto v = get("crawl.obey_robots")) c.obey_robots = *v == "true" || *v == "1";
  if (auto v = get("crawl.site_map")) c.site_map = *v;
  if (auto v = get("store.root")) c.store_root = *v;
  if (auto v = get("pipeline.seed")) c.seed = std::stoull(*v);
  if (auto v = get("pipeline.targets")) c.targets = *v;
  if (auto v = get("pipeline.excluded_domains")) {
    for (auto& d : text::split(*v, ','))
      if (auto t = text::collapse_whitespace(d); !t.empty()) c.excluded_domains.push_back(t);
  }
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_map(parse_config_text(body));
}

// --- small file helpers ---

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// --- fixture loading ---

inline std::vector<features::LabeledPage> load_labeled_pages(
    const std::filesystem::path& fixture_path, const std::filesystem::path& labels_path,
    int top_k = search::kDefaultTopK) {
  auto backend = search::FixtureBackend::load(fixture_path.string());
  std::vector<features::LabeledPage> pages;
  std::size_t entry = 0;
  for (const auto& lj : read_json(labels_path)) {
    ++entry;
    std::string name = lj.at("name").get<std::string>();
    int rank = lj.at("homepage_rank").get<int>();
    if (rank < 1)
      throw InvalidLabelingError(labels_path.string() + " entry " + std::to_string(entry) +
                                 ": query '" + name + "' lacks a positive homepage");
    auto query = search::build_author_query(name, top_k);
    features::LabeledPage lp;
    lp.page = search::execute(query, backend);
    lp.homepage_rank = rank;
    if (rank > static_cast<int>(lp.page.results.size()))
      throw InvalidLabelingError(labels_path.string() + " entry " + std::to_string(entry) +
                                 ": homepage rank beyond result list");
    pages.push_back(std::move(lp));
  }
  return pages;
}

inline void load_classifier_docs(const std::filesystem::path& path,
                                 std::vector<forest::FeatureRow>& X, std::vector<int>& y,
                                 std::vector<doc::NormalizedDocument>* docs = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    auto d = doc::document_from_json(j.at("doc"));
    auto f = doc::extract_structural_features(d);
    X.emplace_back(f.values.begin(), f.values.end());
    y.push_back(j.at("label").get<int>());
    if (docs) docs->push_back(std::move(d));
  }
}

inline crawler::FixtureFetcher load_site_map(const std::filesystem::path& path) {
  crawler::FixtureFetcher fetcher;
  auto j = read_json(path);
  for (const auto& [url, page] : j.at("pages").items())
    fetcher.add_page(url, page.at("content_type").get<std::string>(),
                     page.at("body").get<std::string>());
  return fetcher;
}

// --- ranker training and cross-validation ---

inline std::vector<ltr::LabeledQueryInstances> vectorize_pages(
    const std::vector<features::LabeledPage>& pages, const features::DictionarySet& dicts) {
  std::vector<ltr::LabeledQueryInstances> out;
  for (const auto& lp : pages) {
    ltr::LabeledQueryInstances q;
    q.page = lp.page;
    q.homepage_rank = lp.homepage_rank;
    for (const auto& r : lp.page.results) {
      auto inst = features::vectorize(lp.page.query, r, dicts);
      inst.label = r.rank == lp.homepage_rank ? features::RankLabel::homepage
                                              : features::RankLabel::other;
      q.instances.push_back(std::move(inst));
    }
    out.push_back(std::move(q));
  }
  return out;
}

inline std::vector<ltr::PreferencePair> pairs_from_queries(
    const std::vector<ltr::LabeledQueryInstances>& queries) {
  std::vector<ltr::PreferencePair> pairs;
  for (const auto& q : queries) {
    auto qp = features::build_preference_pairs(q.instances);
    pairs.insert(pairs.end(), qp.begin(), qp.end());
  }
  return pairs;
}

struct CrossValResult {
  double rank_svm_accuracy = 0.0;
  std::map<std::string, double> baseline_accuracy;  // kind name -> per-query accuracy
  std::vector<double> fold_accuracy;                // rank svm, per fold
};

// k-fold over queries. Dictionaries are rebuilt from each training fold so no
// token information leaks across the split.
inline CrossValResult cross_validate_ranker(const std::vector<features::LabeledPage>& pages,
                                            int k, const ltr::TrainConfig& config,
                                            const features::MinDfConfig& min_df = {},
                                            bool with_baselines = true) {
  auto folds = ltr::kfold_assignment(pages.size(), k, config.seed);
  CrossValResult result;
  std::size_t correct_svm = 0;
  std::map<std::string, std::size_t> correct_base;
  std::size_t total = 0;

  for (const auto& test_fold : folds) {
    std::set<std::size_t> held_out(test_fold.begin(), test_fold.end());
    std::vector<features::LabeledPage> train_pages, test_pages;
    for (std::size_t i = 0; i < pages.size(); ++i)
      (held_out.count(i) ? test_pages : train_pages).push_back(pages[i]);

    auto dicts = features::build_dictionaries(train_pages, min_df);
    auto train_q = vectorize_pages(train_pages, dicts);
    auto test_q = vectorize_pages(test_pages, dicts);
    auto pairs = pairs_from_queries(train_q);

    auto model = ltr::train_rank_svm(pairs, dicts.dim(), config);
    auto report = ltr::evaluate_ranker(test_q, model);
    result.fold_accuracy.push_back(report.accuracy());
    correct_svm += static_cast<std::size_t>(report.accuracy() *
                                            static_cast<double>(test_q.size()) + 0.5);
    total += test_q.size();

    if (with_baselines) {
      std::vector<ltr::RankInstance> flat;
      for (const auto& q : train_q)
        flat.insert(flat.end(), q.instances.begin(), q.instances.end());
      for (auto kind : {ltr::PointwiseKind::naive_bayes, ltr::PointwiseKind::logistic,
                        ltr::PointwiseKind::linear_svm}) {
        auto base = ltr::train_pointwise(flat, kind, dicts.dim(), config);
        auto base_report = ltr::evaluate_ranker(
            test_q, [&](const ltr::RankInstance& x) { return base.score(x); });
        correct_base[ltr::pointwise_kind_name(kind)] += static_cast<std::size_t>(
            base_report.accuracy() * static_cast<double>(test_q.size()) + 0.5);
      }
    }
  }
  result.rank_svm_accuracy = static_cast<double>(correct_svm) / static_cast<double>(total);
  for (const auto& [kind, correct] : correct_base)
    result.baseline_accuracy[kind] =
        static_cast<double>(correct) / static_cast<double>(total);
  return result;
}

struct TrainedRanker {
  ltr::LinearRankModel model;
  features::DictionarySet dicts;
};

inline TrainedRanker train_ranker(const std::vector<features::LabeledPage>& pages,
                                  const ltr::TrainConfig& config,
                                  const features::MinDfConfig& min_df = {}) {
  auto dicts = features::build_dictionaries(pages, min_df);
  auto queries = vectorize_pages(pages, dicts);
  auto pairs = pairs_from_queries(queries);
  auto model = ltr::train_rank_svm(pairs, dicts.dim(), config);
  return {std::move(model), std::move(dicts)};
}

// --- the two acquisition paths ---

struct PipelineContext {
  search::SearchBackend* backend = nullptr;
  crawler::HttpFetcher* fetcher = nullptr;
  store::DocStore* store = nullptr;
  const forest::RandomForestModel* classifier = nullptr;
  const ltr::LinearRankModel* ranker = nullptr;          // path 2 only
  const features::DictionarySet* dicts = nullptr;        // path 2 only
  PipelineConfig config;
};

namespace detail {

inline bool domain_excluded(const std::string& url, const std::vector<std::string>& excluded) {
  std::string rest = url;
  if (auto pos = rest.find("://"); pos != std::string::npos) rest = rest.substr(pos + 3);
  if (auto pos = rest.find_first_of("/?#"); pos != std::string::npos) rest = rest.substr(0, pos);
  if (auto pos = rest.find(':'); pos != std::string::npos) rest = rest.substr(0, pos);
  std::string host = text::to_lower(rest);
  for (const auto& d : excluded) {
    if (host == d) return true;
    if (host.size() > d.size() && host.compare(host.size() - d.size() - 1, d.size() + 1, "." + d) == 0)
      return true;
  }
  return false;
}

// Classify + title-extract + store one fetched document. Returns true when
// the document classified as a paper.
inline bool ingest_and_store(PipelineContext& ctx, const std::string& body,
                             const std::string& url, store::AcquisitionPath path,
                             const std::string& origin, store::PathCounters& counters,
                             std::map<std::string, std::int64_t>& histogram) {
  doc::NormalizedDocument d;
  try {
    d = doc::ingest_document(body);
  } catch (const UnparseableDocumentError&) {
    return false;  // recorded as a fetch, unusable as a document
  }
  auto f = doc::extract_structural_features(d);
  forest::FeatureRow row(f.values.begin(), f.values.end());
  auto pred = forest::predict(*ctx.classifier, row);

  store::PutMetadata meta;
  meta.source_url = url;
  meta.acquisition_path = path;
  meta.origin = origin;
  meta.classifier_label =
      pred.label == 1 ? store::ClassifierLabel::paper : store::ClassifierLabel::non_paper;
  meta.classifier_score = pred.score;
  try {
    meta.extracted_title = doc::extract_title_heuristic(d);
  } catch (const NoTitleError&) {
  }
  ctx.store->put(body, meta);

  if (pred.label == 1) {
    ++counters.papers_classified;
    ++histogram[store::top_level_domain(url)];
    return true;
  }
  return false;
}

}  // namespace detail

// Path 1: title query -> fetch each result URL -> classify -> store.
// Result URLs are fetched directly and never expanded; excluded domains are
// skipped before fetching. Per-title failures never abort the batch.
inline void run_path1(const std::vector<std::string>& titles, PipelineContext& ctx,
                      store::Manifest& manifest) {
  auto& counters = manifest.counters(store::AcquisitionPath::path1_search);
  auto& histogram = manifest.histogram(store::AcquisitionPath::path1_search);
  for (const auto& title : titles) {
    search::Query query;
    try {
      query = search::build_title_query(title, ctx.config.top_k);
    } catch (const InvalidInputError&) {
      continue;  // blank line in a titles file
    }
    ++counters.queries_issued;
    search::ResultPage page;
    try {
      page = search::execute(query, *ctx.backend);
    } catch (const std::exception&) {
      continue;  // query failed; already counted as issued
    }
    for (const auto& r : page.results) {
      if (detail::domain_excluded(r.url, ctx.config.excluded_domains)) continue;
      std::string canon;
      try {
        canon = crawler::canonicalize_url(r.url);
      } catch (const InvalidUrlError&) {
        continue;
      }
      auto resp = ctx.fetcher->get(canon, 10000);
      if (resp.status != 200) continue;
      if (!crawler::detail::is_pdf_response(canon, resp.content_type)) continue;
      ++counters.pdfs_fetched;
      detail::ingest_and_store(ctx, resp.body, canon, store::AcquisitionPath::path1_search,
                               query.id, counters, histogram);
    }
  }
}

struct Path2QueryLog {
  std::string name;
  std::string outcome;  // predicted homepage URL, or the skip reason
};

// Path 2: author query -> rank results -> crawl the predicted homepage at
// depth max_depth -> classify and store every fetched PDF.
inline std::vector<Path2QueryLog> run_path2(const std::vector<std::string>& names,
                                            PipelineContext& ctx, store::Manifest& manifest) {
  if (!ctx.ranker || !ctx.dicts)
    throw InvalidInputError("run_path2: ranker model and dictionaries required");
  auto& counters = manifest.counters(store::AcquisitionPath::path2_crawl);
  auto& histogram = manifest.histogram(store::AcquisitionPath::path2_crawl);
  std::vector<Path2QueryLog> log;

  for (const auto& name : names) {
    search::Query query;
    try {
      query = search::build_author_query(name, ctx.config.top_k);
    } catch (const InvalidInputError&) {
      continue;
    }
    ++counters.queries_issued;
    search::ResultPage page;
    try {
      page = search::execute(query, *ctx.backend);
    } catch (const std::exception& e) {
      log.push_back({name, std::string("query failed: ") + e.what()});
      continue;
    }
    if (page.results.empty()) {
      log.push_back({name, "no results"});
      continue;
    }
    std::vector<ltr::RankInstance> instances;
    for (const auto& r : page.results)
      instances.push_back(features::vectorize(query, r, *ctx.dicts));
    const auto& predicted = ltr::predict_homepage(page, instances, *ctx.ranker);
    log.push_back({name, predicted.url});

    crawler::CrawlJob job;
    job.seeds = {predicted.url};
    job.max_depth = ctx.config.max_depth;
    job.politeness.per_host_delay_ms = ctx.config.per_host_delay_ms;
    job.politeness.max_pages = ctx.config.max_pages;
    job.politeness.obey_robots = ctx.config.obey_robots;

    crawler::PdfSink sink = [&](const std::string& url, const std::string& body) {
      ++counters.pdfs_fetched;
      detail::ingest_and_store(ctx, body, url, store::AcquisitionPath::path2_crawl, query.id,
                               counters, histogram);
      return std::make_pair(hash::sha256_hex(body), std::string("store"));
    };
    try {
      crawler::crawl(job, *ctx.fetcher, sink);
    } catch (const InvalidInputError& e) {
      log.back().outcome = std::string("crawl failed: ") + e.what();
    }
  }
  return log;
}

// Unique-title and target-match accounting over the finished store. A record
// contributes to a path when any of its provenance entries used that path.
inline store::TargetMatchResult finalize_manifest(const store::DocStore& docstore,
                                                  const std::vector<store::Target>& targets,
                                                  store::Manifest& manifest) {
  auto records = docstore.records();
  std::set<std::string> titles[2];
  for (const auto& r : records) {
    if (r.classifier_label != store::ClassifierLabel::paper) continue;
    if (!r.extracted_title || r.extracted_title->normalized.empty()) continue;
    bool on_path[2] = {false, false};
    for (const auto& p : r.provenance)
      on_path[p.acquisition_path == store::AcquisitionPath::path2_crawl ? 1 : 0] = true;
    if (on_path[0]) titles[0].insert(r.extracted_title->normalized);
    if (on_path[1]) titles[1].insert(r.extracted_title->normalized);
  }
  manifest.path1.unique_titles = static_cast<std::int64_t>(titles[0].size());
  manifest.path2.unique_titles = static_cast<std::int64_t>(titles[1].size());
  std::int64_t overlap = 0;
  for (const auto& t : titles[0])
    if (titles[1].count(t)) ++overlap;
  manifest.title_overlap = overlap;

  auto load_doc = [&](const store::DocumentRecord& r) {
    return doc::ingest_document(docstore.read_blob(r.content_hash));
  };
  auto matches = store::match_against_targets(records, load_doc, targets);

  // split matches per acquisition path
  std::set<std::string> matched_per_path[2];
  std::map<std::string, const store::DocumentRecord*> by_hash;
  for (const auto& r : records) by_hash[r.content_hash] = &r;
  for (const auto& [target_id, hashes] : matches.hits) {
    for (const auto& h : hashes) {
      for (const auto& p : by_hash.at(h)->provenance)
        matched_per_path[p.acquisition_path == store::AcquisitionPath::path2_crawl ? 1 : 0]
            .insert(target_id);
    }
  }
  manifest.path1.target_matches = static_cast<std::int64_t>(matched_per_path[0].size());
  manifest.path2.target_matches = static_cast<std::int64_t>(matched_per_path[1].size());
  return matches;
}

inline std::vector<store::Target> load_targets(const std::filesystem::path& path) {
  std::vector<store::Target> targets;
  for (const auto& tj : read_json(path))
    targets.push_back({tj.at("id").get<std::string>(), tj.at("title").get<std::string>(),
                       tj.at("authors").get<std::vector<std::string>>()});
  return targets;
}

inline std::vector<std::string> load_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (auto t = text::collapse_whitespace(line); !t.empty()) lines.push_back(t);
  }
  return lines;
}

}  // namespace paperharvest::pipeline
