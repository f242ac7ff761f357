#pragma once

// Content-addressed document store: blobs under a two-level hash-prefix tree,
// an append-only JSON-lines ledger, and yield accounting per acquisition path.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "paperharvest/doc.hpp"
#include "paperharvest/errors.hpp"
#include "paperharvest/hash.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::store {

enum class AcquisitionPath { path1_search, path2_crawl };

inline const char* path_name(AcquisitionPath p) {
  return p == AcquisitionPath::path1_search ? "path1_search" : "path2_crawl";
}

inline AcquisitionPath path_from_name(const std::string& s) {
  if (s == "path1_search") return AcquisitionPath::path1_search;
  if (s == "path2_crawl") return AcquisitionPath::path2_crawl;
  throw ParseError("unknown acquisition path: " + s);
}

enum class ClassifierLabel { paper, non_paper, unclassified };

inline const char* label_name(ClassifierLabel l) {
  switch (l) {
    case ClassifierLabel::paper: return "paper";
    case ClassifierLabel::non_paper: return "non_paper";
    case ClassifierLabel::unclassified: return "unclassified";
  }
  return "?";
}

inline ClassifierLabel label_from_name(const std::string& s) {
  if (s == "paper") return ClassifierLabel::paper;
  if (s == "non_paper") return ClassifierLabel::non_paper;
  if (s == "unclassified") return ClassifierLabel::unclassified;
  throw ParseError("unknown classifier label: " + s);
}

struct Provenance {
  std::string source_url;
  AcquisitionPath acquisition_path = AcquisitionPath::path1_search;
  std::string origin;  // query id or seed URL
};

struct DocumentRecord {
  std::string content_hash;
  std::vector<Provenance> provenance;  // first entry is the original acquisition
  ClassifierLabel classifier_label = ClassifierLabel::unclassified;
  double classifier_score = 0.0;
  std::optional<doc::TitleRecord> extracted_title;
  std::optional<std::string> matched_target;
  std::int64_t stored_at_ms = 0;
  std::string stored_path;

  const Provenance& first_provenance() const { return provenance.at(0); }
};

struct PutMetadata {
  std::string source_url;
  AcquisitionPath acquisition_path = AcquisitionPath::path1_search;
  std::string origin;
  ClassifierLabel classifier_label = ClassifierLabel::unclassified;
  double classifier_score = 0.0;
  std::optional<doc::TitleRecord> extracted_title;
};

namespace detail {

inline nlohmann::json record_to_json(const DocumentRecord& r) {
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& p : r.provenance)
    prov.push_back({{"source_url", p.source_url},
                    {"path", path_name(p.acquisition_path)},
                    {"origin", p.origin}});
  nlohmann::json j = {{"content_hash", r.content_hash},
                      {"provenance", std::move(prov)},
                      {"label", label_name(r.classifier_label)},
                      {"score", r.classifier_score},
                      {"stored_at_ms", r.stored_at_ms},
                      {"stored_path", r.stored_path}};
  if (r.extracted_title)
    j["title"] = {{"raw", r.extracted_title->raw}, {"normalized", r.extracted_title->normalized}};
  if (r.matched_target) j["matched_target"] = *r.matched_target;
  return j;
}

inline DocumentRecord record_from_json(const nlohmann::json& j) {
  DocumentRecord r;
  r.content_hash = j.at("content_hash").get<std::string>();
  for (const auto& pj : j.at("provenance")) {
    Provenance p;
    p.source_url = pj.at("source_url").get<std::string>();
    p.acquisition_path = path_from_name(pj.at("path").get<std::string>());
    p.origin = pj.at("origin").get<std::string>();
    r.provenance.push_back(std::move(p));
  }
  r.classifier_label = label_from_name(j.at("label").get<std::string>());
  r.classifier_score = j.at("score").get<double>();
  r.stored_at_ms = j.at("stored_at_ms").get<std::int64_t>();
  r.stored_path = j.at("stored_path").get<std::string>();
  if (j.contains("title"))
    r.extracted_title = doc::TitleRecord{j["title"].at("raw").get<std::string>(),
                                         j["title"].at("normalized").get<std::string>()};
  if (j.contains("matched_target")) r.matched_target = j["matched_target"].get<std::string>();
  return r;
}

}  // namespace detail

class DocStore {
 public:
  explicit DocStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "blobs");
    load_ledger();
  }

  // Idempotent: re-putting identical bytes returns the existing record with
  // the new provenance appended. Blob writes are write-temp-then-rename.
  DocumentRecord put(const std::string& bytes, const PutMetadata& meta) {
    if (bytes.empty()) throw InvalidInputError("docstore put: empty bytes");
    std::lock_guard lock(mu_);
    std::string digest = hash::sha256_hex(bytes);
    auto it = records_.find(digest);
    if (it != records_.end()) {
      it->second.provenance.push_back({meta.source_url, meta.acquisition_path, meta.origin});
      if (it->second.classifier_label == ClassifierLabel::unclassified &&
          meta.classifier_label != ClassifierLabel::unclassified) {
        it->second.classifier_label = meta.classifier_label;
        it->second.classifier_score = meta.classifier_score;
      }
      if (!it->second.extracted_title && meta.extracted_title)
        it->second.extracted_title = meta.extracted_title;
      append_ledger(it->second);
      return it->second;
    }

    std::filesystem::path blob = blob_path(digest);
    std::filesystem::create_directories(blob.parent_path());
    std::filesystem::path tmp = blob;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw IoError("docstore put: cannot write " + tmp.string());
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw IoError("docstore put: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, blob);

    DocumentRecord r;
    r.content_hash = digest;
    r.provenance.push_back({meta.source_url, meta.acquisition_path, meta.origin});
    r.classifier_label = meta.classifier_label;
    r.classifier_score = meta.classifier_score;
    r.extracted_title = meta.extracted_title;
    r.stored_at_ms = next_timestamp();
    r.stored_path = std::filesystem::relative(blob, root_).string();
    records_.emplace(digest, r);
    order_.push_back(digest);
    append_ledger(r);
    return r;
  }

  bool contains(const std::string& content_hash) const { return records_.count(content_hash) > 0; }

  const DocumentRecord& get(const std::string& content_hash) const {
    auto it = records_.find(content_hash);
    if (it == records_.end()) throw NotFoundError("docstore: no record " + content_hash);
    return it->second;
  }

  std::string read_blob(const std::string& content_hash) const {
    std::filesystem::path blob = blob_path(content_hash);
    std::ifstream in(blob, std::ios::binary);
    if (!in) throw IoError("docstore: cannot read blob " + blob.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void set_matched_target(const std::string& content_hash, const std::string& target_id) {
    std::lock_guard lock(mu_);
    auto it = records_.find(content_hash);
    if (it == records_.end()) throw NotFoundError("docstore: no record " + content_hash);
    it->second.matched_target = target_id;
    append_ledger(it->second);
  }

  // Insertion order, one record per distinct blob.
  std::vector<DocumentRecord> records() const {
    std::vector<DocumentRecord> out;
    out.reserve(order_.size());
    for (const auto& h : order_) out.push_back(records_.at(h));
    return out;
  }

  std::size_t size() const { return records_.size(); }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path blob_path(const std::string& digest) const {
    return root_ / "blobs" / digest.substr(0, 2) / digest.substr(2, 2) / digest;
  }

  // Ledger rebuilds must be exact; later lines supersede earlier ones for the
  // same hash.
  void load_ledger() {
    std::ifstream in(root_ / "ledger.jsonl");
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      DocumentRecord r;
      try {
        r = detail::record_from_json(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("ledger.jsonl:" + std::to_string(lineno) + ": " + e.what());
      }
      auto [it, fresh] = records_.insert_or_assign(r.content_hash, std::move(r));
      if (fresh) order_.push_back(it->first);
      last_timestamp_ = std::max(last_timestamp_, it->second.stored_at_ms);
    }
  }

  void append_ledger(const DocumentRecord& r) {
    std::ofstream out(root_ / "ledger.jsonl", std::ios::app);
    if (!out) throw IoError("docstore: cannot append ledger");
    out << detail::record_to_json(r).dump() << "\n";
    if (!out) throw IoError("docstore: ledger write failed");
  }

  // Monotonic, deterministic ordering stamp (not wall-clock: reproducible
  // ledgers matter more than real timestamps at fixture scale).
  std::int64_t next_timestamp() { return ++last_timestamp_; }

  std::filesystem::path root_;
  std::mutex mu_;  // serializes put / ledger appends
  std::unordered_map<std::string, DocumentRecord> records_;
  std::vector<std::string> order_;
  std::int64_t last_timestamp_ = 0;
};

// --- accounting ---

struct PathCounters {
  std::int64_t queries_issued = 0;
  std::int64_t pdfs_fetched = 0;
  std::int64_t papers_classified = 0;
  std::int64_t unique_titles = 0;
  std::int64_t target_matches = 0;
};

struct Manifest {
  PathCounters path1;
  PathCounters path2;
  std::map<std::string, std::int64_t> domain_histogram[2];  // per path: TLD -> papers
  std::int64_t title_overlap = 0;  // unique titles seen on both paths

  PathCounters& counters(AcquisitionPath p) {
    return p == AcquisitionPath::path1_search ? path1 : path2;
  }
  const PathCounters& counters(AcquisitionPath p) const {
    return p == AcquisitionPath::path1_search ? path1 : path2;
  }
  std::map<std::string, std::int64_t>& histogram(AcquisitionPath p) {
    return domain_histogram[p == AcquisitionPath::path1_search ? 0 : 1];
  }
  const std::map<std::string, std::int64_t>& histogram(AcquisitionPath p) const {
    return domain_histogram[p == AcquisitionPath::path1_search ? 0 : 1];
  }
};

// Top-level domain of a URL's host, for the domain histogram.
inline std::string top_level_domain(const std::string& url) {
  std::string rest = url;
  if (auto pos = rest.find("://"); pos != std::string::npos) rest = rest.substr(pos + 3);
  if (auto pos = rest.find_first_of("/?#"); pos != std::string::npos) rest = rest.substr(0, pos);
  if (auto pos = rest.find(':'); pos != std::string::npos) rest = rest.substr(0, pos);
  auto labels = text::split(text::to_lower(rest), '.');
  return labels.empty() ? "" : labels.back();
}

// Distinct normalized titles among paper-labeled records; records without an
// extracted title are excluded.
inline std::int64_t count_unique_titles(const std::vector<DocumentRecord>& records) {
  std::set<std::string> titles;
  for (const auto& r : records) {
    if (r.classifier_label != ClassifierLabel::paper) continue;
    if (!r.extracted_title || r.extracted_title->normalized.empty()) continue;
    titles.insert(r.extracted_title->normalized);
  }
  return static_cast<std::int64_t>(titles.size());
}

struct Target {
  std::string id;
  std::string title;
  std::vector<std::string> authors;
};

struct TargetMatchResult {
  std::int64_t matched_targets = 0;  // targets with >= 1 matching record
  std::map<std::string, std::vector<std::string>> hits;  // target id -> content hashes
};

// A record matches at most one target: the first in target order whose title
// and one author surname appear on the document's first page.
inline TargetMatchResult match_against_targets(
    const std::vector<DocumentRecord>& records,
    const std::function<doc::NormalizedDocument(const DocumentRecord&)>& load_doc,
    const std::vector<Target>& targets) {
  for (const auto& t : targets)
    if (t.title.empty()) throw InvalidInputError("match_against_targets: empty target title");
  TargetMatchResult result;
  for (const auto& r : records) {
    doc::NormalizedDocument d;
    try {
      d = load_doc(r);
    } catch (const std::exception&) {
      continue;
    }
    for (const auto& t : targets) {
      if (doc::match_title(d, t.title, t.authors)) {
        result.hits[t.id].push_back(r.content_hash);
        break;
      }
    }
  }
  result.matched_targets = static_cast<std::int64_t>(result.hits.size());
  return result;
}

// --- reporting ---

inline nlohmann::json manifest_to_json(const Manifest& m) {
  auto counters = [](const PathCounters& c) {
    return nlohmann::json{{"queries", c.queries_issued},
                          {"pdfs", c.pdfs_fetched},
                          {"papers", c.papers_classified},
                          {"unique_titles", c.unique_titles},
                          {"matches", c.target_matches}};
  };
  auto averages = [](const PathCounters& c) {
    double q = c.queries_issued > 0 ? static_cast<double>(c.queries_issued) : 0.0;
    return nlohmann::json{
        {"papers_per_query", q > 0 ? static_cast<double>(c.papers_classified) / q : 0.0},
        {"pdfs_per_query", q > 0 ? static_cast<double>(c.pdfs_fetched) / q : 0.0}};
  };
  return {{"path1", counters(m.path1)},
          {"path2", counters(m.path2)},
          {"path1_averages", averages(m.path1)},
          {"path2_averages", averages(m.path2)},
          {"path1_domains", m.domain_histogram[0]},
          {"path2_domains", m.domain_histogram[1]},
          {"title_overlap", m.title_overlap}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  auto read = [&](const nlohmann::json& cj, PathCounters& c) {
    c.queries_issued = cj.at("queries").get<std::int64_t>();
    c.pdfs_fetched = cj.at("pdfs").get<std::int64_t>();
    c.papers_classified = cj.at("papers").get<std::int64_t>();
    c.unique_titles = cj.at("unique_titles").get<std::int64_t>();
    c.target_matches = cj.at("matches").get<std::int64_t>();
  };
  read(j.at("path1"), m.path1);
  read(j.at("path2"), m.path2);
  m.domain_histogram[0] = j.at("path1_domains").get<std::map<std::string, std::int64_t>>();
  m.domain_histogram[1] = j.at("path2_domains").get<std::map<std::string, std::int64_t>>();
  m.title_overlap = j.value("title_overlap", 0);
  return m;
}

inline std::string manifest_to_tsv(const Manifest& m) {
  auto row = [](const char* name, const PathCounters& c) {
    std::string r = name;
    for (std::int64_t v : {c.queries_issued, c.pdfs_fetched, c.papers_classified, c.unique_titles,
                           c.target_matches}) {
      r += "\t" + std::to_string(v);
    }
    return r + "\n";
  };
  std::string out = "path\tqueries\tpdfs\tpapers\tunique_titles\tmatches\n";
  out += row("path1_search", m.path1);
  out += row("path2_crawl", m.path2);
  return out;
}

enum class ReportFormat { tsv, json };

inline void export_report(const Manifest& m, ReportFormat format,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("export_report: cannot open " + path.string());
  if (format == ReportFormat::tsv)
    out << manifest_to_tsv(m);
  else
    out << manifest_to_json(m).dump(2) << "\n";
  if (!out) throw IoError("export_report: write failed on " + path.string());
}

}  // namespace paperharvest::store
