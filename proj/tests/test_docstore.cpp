#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <set>

#include "paperharvest/docstore.hpp"

using namespace paperharvest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ph_store_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

store::PutMetadata meta_of(std::string url, store::AcquisitionPath p,
                           store::ClassifierLabel label = store::ClassifierLabel::paper,
                           std::optional<std::string> title = std::nullopt) {
  store::PutMetadata m;
  m.source_url = std::move(url);
  m.acquisition_path = p;
  m.origin = "origin-q";
  m.classifier_label = label;
  m.classifier_score = label == store::ClassifierLabel::paper ? 0.9 : 0.1;
  if (title) m.extracted_title = doc::make_title_record(*title);
  return m;
}

}  // namespace

TEST_CASE("put stores bytes content-addressed and reads them back") {
  TempDir dir;
  store::DocStore s(dir.path);
  auto rec = s.put("PDFBYTES", meta_of("http://a.edu/x.pdf", store::AcquisitionPath::path1_search));
  CHECK(rec.content_hash == hash::sha256_hex("PDFBYTES"));
  CHECK(s.contains(rec.content_hash));
  CHECK(s.read_blob(rec.content_hash) == "PDFBYTES");
  CHECK(rec.stored_path ==
        (fs::path("blobs") / rec.content_hash.substr(0, 2) / rec.content_hash.substr(2, 2) /
         rec.content_hash).string());
  CHECK(fs::exists(dir.path / rec.stored_path));
  CHECK_THROWS_AS(s.put("", meta_of("u", store::AcquisitionPath::path1_search)),
                  InvalidInputError);
  CHECK_THROWS_AS(s.get("deadbeef"), NotFoundError);
}

TEST_CASE("duplicate bytes merge provenance instead of duplicating records") {
  TempDir dir;
  store::DocStore s(dir.path);
  auto first = s.put("SAME", meta_of("http://a.edu/one.pdf", store::AcquisitionPath::path1_search));
  auto second = s.put("SAME", meta_of("http://b.org/two.pdf", store::AcquisitionPath::path2_crawl));
  CHECK(s.size() == 1);
  CHECK(second.content_hash == first.content_hash);
  REQUIRE(second.provenance.size() == 2);
  CHECK(second.provenance[0].source_url == "http://a.edu/one.pdf");
  CHECK(second.provenance[1].source_url == "http://b.org/two.pdf");
  CHECK(second.provenance[1].acquisition_path == store::AcquisitionPath::path2_crawl);
  CHECK(second.stored_at_ms == first.stored_at_ms);
}

TEST_CASE("a later classified put upgrades an unclassified record") {
  TempDir dir;
  store::DocStore s(dir.path);
  s.put("DOC", meta_of("u1", store::AcquisitionPath::path1_search,
                       store::ClassifierLabel::unclassified));
  auto rec = s.put("DOC", meta_of("u2", store::AcquisitionPath::path1_search,
                                  store::ClassifierLabel::paper, "A Title Of Note"));
  CHECK(rec.classifier_label == store::ClassifierLabel::paper);
  REQUIRE(rec.extracted_title.has_value());
  CHECK(rec.extracted_title->normalized == "a title of note");

  // but an already-labeled record is not overwritten
  auto rec2 = s.put("DOC", meta_of("u3", store::AcquisitionPath::path1_search,
                                   store::ClassifierLabel::non_paper));
  CHECK(rec2.classifier_label == store::ClassifierLabel::paper);
}

TEST_CASE("ledger rebuild restores records, order, and timestamps exactly") {
  TempDir dir;
  std::vector<store::DocumentRecord> before;
  {
    store::DocStore s(dir.path);
    for (int i = 0; i < 6; ++i)
      s.put("BYTES-" + std::to_string(i),
            meta_of("http://h.edu/" + std::to_string(i) + ".pdf",
                    i % 2 ? store::AcquisitionPath::path2_crawl
                          : store::AcquisitionPath::path1_search,
                    store::ClassifierLabel::paper, "Title Number " + std::to_string(i)));
    s.put("BYTES-2", meta_of("http://mirror.org/2.pdf", store::AcquisitionPath::path2_crawl));
    s.set_matched_target(hash::sha256_hex("BYTES-3"), "target-3");
    before = s.records();
  }
  store::DocStore reopened(dir.path);
  auto after = reopened.records();
  REQUIRE(after.size() == before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(after[i].content_hash == before[i].content_hash);
    CHECK(after[i].stored_at_ms == before[i].stored_at_ms);
    CHECK(after[i].provenance.size() == before[i].provenance.size());
    CHECK(after[i].classifier_label == before[i].classifier_label);
    CHECK(after[i].matched_target == before[i].matched_target);
    CHECK(store::detail::record_to_json(after[i]) == store::detail::record_to_json(before[i]));
  }

  // new puts after reopening continue the timestamp sequence monotonically
  auto fresh = reopened.put("BYTES-NEW", meta_of("u", store::AcquisitionPath::path1_search));
  CHECK(fresh.stored_at_ms > before.back().stored_at_ms);
}

TEST_CASE("unique titles: normalization collapses casing and punctuation") {
  std::vector<store::DocumentRecord> records;
  auto add = [&](const char* title, store::ClassifierLabel label) {
    store::DocumentRecord r;
    r.classifier_label = label;
    r.extracted_title = doc::make_title_record(title);
    records.push_back(std::move(r));
  };
  add("Self-Taught Learning", store::ClassifierLabel::paper);
  add("self taught LEARNING", store::ClassifierLabel::paper);
  add("A Different Paper", store::ClassifierLabel::paper);
  add("Slides About Things", store::ClassifierLabel::non_paper);  // not counted
  store::DocumentRecord untitled;
  untitled.classifier_label = store::ClassifierLabel::paper;
  records.push_back(untitled);  // no title: not counted
  CHECK(store::count_unique_titles(records) == 2);
}

TEST_CASE("top level domain extraction") {
  CHECK(store::top_level_domain("http://www.cs.example.edu/x.pdf") == "edu");
  CHECK(store::top_level_domain("https://mirror.org:8443/a?b#c") == "org");
  CHECK(store::top_level_domain("example.com/path") == "com");
}

TEST_CASE("inclusion-exclusion holds over random title assignments") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::set<std::string> p1, p2;
    int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      std::string t = "title " + std::to_string(rng() % 15);
      switch (rng() % 3) {
        case 0: p1.insert(t); break;
        case 1: p2.insert(t); break;
        default: p1.insert(t); p2.insert(t);
      }
    }
    std::set<std::string> uni = p1, inter;
    uni.insert(p2.begin(), p2.end());
    for (const auto& t : p1)
      if (p2.count(t)) inter.insert(t);
    CHECK(p1.size() + p2.size() - inter.size() == uni.size());
  }
}

TEST_CASE("target matching: first matching target wins, one per record") {
  TempDir dir;
  store::DocStore s(dir.path);
  auto body = [](const std::string& title, const std::string& author) {
    doc::NormalizedDocument d;
    d.doc_id = "d";
    d.byte_size = 100;
    d.pages = {{title, author, "Abstract"}};
    return doc::document_to_json(d).dump();
  };
  s.put(body("Shared Words In Title Alpha", "Jane Roe"),
        meta_of("u1", store::AcquisitionPath::path1_search));
  s.put(body("Another Work Entirely", "Sam Poe"),
        meta_of("u2", store::AcquisitionPath::path1_search));
  s.put(body("Unrelated Slide Deck", "Nobody Known"),
        meta_of("u3", store::AcquisitionPath::path1_search));

  std::vector<store::Target> targets{
      {"t1", "Shared Words In Title Alpha", {"Jane Roe"}},
      {"t2", "Shared Words In Title", {"Jane Roe"}},  // also matches record 1, but t1 is first
      {"t3", "Another Work Entirely", {"Sam Poe"}},
  };
  auto result = store::match_against_targets(
      s.records(), [&](const store::DocumentRecord& r) {
        return doc::ingest_document(s.read_blob(r.content_hash));
      },
      targets);
  CHECK(result.matched_targets == 2);
  REQUIRE(result.hits.count("t1") == 1);
  CHECK(result.hits.count("t2") == 0);
  CHECK(result.hits.count("t3") == 1);
  CHECK_THROWS_AS(store::match_against_targets({}, {}, {{"t", "", {}}}), InvalidInputError);
}

TEST_CASE("manifest tsv has the fixed header and one row per path") {
  store::Manifest m;
  m.path1 = {60, 70, 55, 50, 49};
  m.path2 = {25, 94, 70, 47, 44};
  auto tsv = store::manifest_to_tsv(m);
  auto lines = text::split(tsv, '\n');
  REQUIRE(lines.size() >= 3);
  CHECK(lines[0] == "path\tqueries\tpdfs\tpapers\tunique_titles\tmatches");
  CHECK(lines[1] == "path1_search\t60\t70\t55\t50\t49");
  CHECK(lines[2] == "path2_crawl\t25\t94\t70\t47\t44");
}

TEST_CASE("empty manifest renders zeros without dividing by zero") {
  store::Manifest m;
  auto j = store::manifest_to_json(m);
  CHECK(j["path1_averages"]["papers_per_query"] == 0.0);
  auto tsv = store::manifest_to_tsv(m);
  CHECK(tsv.find("path1_search\t0\t0\t0\t0\t0") != std::string::npos);
}

TEST_CASE("manifest json round-trips") {
  store::Manifest m;
  m.path1 = {10, 12, 9, 8, 7};
  m.path2 = {5, 20, 15, 11, 6};
  m.domain_histogram[0] = {{"edu", 7}, {"org", 2}};
  m.domain_histogram[1] = {{"edu", 15}};
  m.title_overlap = 4;
  auto restored = store::manifest_from_json(store::manifest_to_json(m));
  CHECK(store::manifest_to_json(restored) == store::manifest_to_json(m));
}
