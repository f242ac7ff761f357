#pragma once

// Deterministic desk-scale fixture generator: a labeled homepage-search
// corpus, a servable mini-web of author sites with documents in the
// pre-extracted text format, a labeled document set for the classifier, and
// ground-truth enumeration files for the end-to-end checks. Everything is a
// pure function of the FixtureSpec.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "paperharvest/doc.hpp"
#include "paperharvest/docstore.hpp"
#include "paperharvest/errors.hpp"
#include "paperharvest/search.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::fixtures {

struct FixtureSpec {
  std::uint64_t seed = 7;
  int n_authors = 200;          // ranker training/eval queries
  int n_pipeline_authors = 24;  // authors with servable sites (path 2)
  int n_papers = 60;            // paper titles (path 1 queries and targets)
  int n_classifier_docs = 520;  // labeled docs, half papers
  int top_k = 10;
  // Noise recipe for the ranker corpus:
  double distractor_name_noise = 0.65;  // chance a linkedin/dblp distractor carries name tokens
  double weak_homepage_signal = 0.35;   // chance the true homepage loses its title/snippet cues
  double homepage_mirror_rate = 0.15;   // chance a look-alike mirror appears in the results
};

namespace detail {

inline const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v = {
      "alice",  "bruno",  "carla",  "daniel", "elena",  "farid",  "greta",  "hugo",
      "irene",  "jonas",  "katya",  "liam",   "maria",  "nikhil", "olga",   "pavel",
      "quinn",  "ravi",   "sofia",  "tomas",  "ursula", "victor", "wendy",  "xavier"};
  return v;
}

inline const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v = {
      "almeida",   "bergstrom", "castellano", "dvorak",    "eriksen",  "fontaine",
      "gruber",    "hashimoto", "iversen",    "jankovic",  "kowalski", "lindqvist",
      "moretti",   "novak",     "okafor",     "petrov",    "quintana", "rosenberg",
      "sandoval",  "takahashi", "ulrich",     "vasquez",   "weinstein", "xanthos",
      "yamamoto",  "zielinski", "abernathy",  "bhattacharya", "cervantes", "dubois"};
  return v;
}

inline const std::vector<std::string>& univ_hosts() {
  static const std::vector<std::string> v = {
      "www.northlake.edu",  "www.stonebridge.edu", "www.eastfield.edu", "www.clearwatertech.edu",
      "www.harborview.edu", "www.pinecrest.edu",   "www.westmont.edu",  "www.silvergrove.edu",
      "www.redmondpoly.edu", "www.lakeshore.edu",  "www.granville.edu", "www.ironwood.edu"};
  return v;
}

inline const std::vector<std::string>& title_adjectives() {
  static const std::vector<std::string> v = {
      "Scalable", "Distributed", "Adaptive", "Efficient", "Robust",  "Incremental",
      "Parallel", "Sparse",      "Latent",   "Bayesian",  "Greedy",  "Online"};
  return v;
}

inline const std::vector<std::string>& title_nouns() {
  static const std::vector<std::string> v = {
      "Inference",  "Optimization", "Clustering", "Ranking",   "Classification", "Sampling",
      "Embeddings", "Regression",   "Matching",   "Retrieval", "Summarization",  "Alignment"};
  return v;
}

inline const std::vector<std::string>& title_domains() {
  static const std::vector<std::string> v = {
      "Graph Streams",    "Relational Data",   "Sensor Networks", "Text Corpora",
      "Sparse Matrices",  "Markov Models",     "Neural Networks", "Knowledge Bases",
      "Time Series",      "Social Networks",   "Image Collections", "Logic Programs"};
  return v;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> v = {
      "the",       "approach",  "method",     "results",  "analysis", "model",   "data",
      "algorithm", "propose",   "show",       "study",    "evaluate", "compare", "framework",
      "structure", "empirical", "theoretical", "bounds",  "novel",    "problem", "setting",
      "experiments", "baseline", "performance", "improve", "measure", "training", "samples"};
  return v;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool chance(double p) { return unit() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::string sentence(Rng& rng, int words) {
  std::string s;
  for (int i = 0; i < words; ++i) {
    if (i) s += " ";
    s += rng.pick(filler_words());
  }
  return s;
}

inline std::string cap(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace detail

struct Author {
  std::string first, last;

  std::string display() const { return detail::cap(first) + " " + detail::cap(last); }
};

enum class DocKind { paper, slides, cv, thesis, other };

inline int doc_label(DocKind k) { return k == DocKind::paper ? 1 : 0; }

struct Paper {
  std::string id;
  std::string title;
  std::vector<std::string> author_names;  // display form
  int owner = -1;                         // pipeline author index, -1 = unhosted
  bool deep = false;                      // linked only beyond crawl depth
  bool reachable_path1 = false;           // has a usable path-1 search result
};

// --- document builders (pre-extracted text model) ---

namespace detail {

inline doc::NormalizedDocument make_paper_doc(const std::string& doc_id, const Paper& paper,
                                              Rng& rng) {
  doc::NormalizedDocument d;
  d.doc_id = doc_id;
  std::vector<std::string> page1;
  page1.push_back(paper.title);
  std::string byline;
  for (std::size_t i = 0; i < paper.author_names.size(); ++i) {
    if (i) byline += ", ";
    byline += paper.author_names[i];
  }
  page1.push_back(byline);
  auto surname = text::tokenize(paper.author_names.front()).back();
  page1.push_back(surname + "@" + "mail.example.edu");
  page1.push_back("");
  page1.push_back("Abstract");
  for (int i = 0; i < rng.uniform(3, 5); ++i) page1.push_back(cap(sentence(rng, rng.uniform(9, 13))) + ".");
  page1.push_back("In this paper we " + sentence(rng, rng.uniform(6, 9)) + ".");
  d.pages.push_back(page1);

  int body_pages = rng.uniform(6, 11);
  for (int p = 0; p < body_pages; ++p) {
    std::vector<std::string> page;
    if (p == 0) page.push_back("Introduction");
    else page.push_back(std::to_string(p + 1) + " " + cap(sentence(rng, 2)));
    for (int l = 0; l < rng.uniform(16, 24); ++l)
      page.push_back(cap(sentence(rng, rng.uniform(8, 13))) + ".");
    d.pages.push_back(page);
  }
  std::vector<std::string> last;
  last.push_back("Acknowledgments");
  last.push_back(cap(sentence(rng, 10)) + ".");
  last.push_back("References");
  for (int l = 0; l < rng.uniform(8, 14); ++l)
    last.push_back("[" + std::to_string(l + 1) + "] " + cap(sentence(rng, rng.uniform(6, 10))) + ".");
  d.pages.push_back(last);

  std::int64_t chars = 0;
  for (const auto& page : d.pages)
    for (const auto& line : page) chars += static_cast<std::int64_t>(line.size());
  d.byte_size = chars * 3 + 20480;
  return d;
}

inline doc::NormalizedDocument make_slides_doc(const std::string& doc_id, Rng& rng) {
  doc::NormalizedDocument d;
  d.doc_id = doc_id;
  int n_pages = rng.uniform(12, 24);
  for (int p = 0; p < n_pages; ++p) {
    std::vector<std::string> page;
    page.push_back("Lecture " + std::to_string(p + 1));
    for (int l = 0; l < rng.uniform(4, 7); ++l)
      page.push_back("- " + sentence(rng, rng.uniform(1, 3)));
    d.pages.push_back(page);
  }
  d.byte_size = 1024 * rng.uniform(300, 900);
  return d;
}

inline doc::NormalizedDocument make_cv_doc(const std::string& doc_id, const std::string& name,
                                           Rng& rng) {
  doc::NormalizedDocument d;
  d.doc_id = doc_id;
  std::vector<std::string> page1;
  page1.push_back("Curriculum Vitae");
  page1.push_back(name);
  page1.push_back(text::to_lower(text::tokenize(name).back()) + "@dept.example.edu");
  page1.push_back("www.example.edu/people");
  page1.push_back("Education");
  for (int l = 0; l < rng.uniform(4, 7); ++l) page1.push_back("- " + sentence(rng, rng.uniform(2, 4)));
  d.pages.push_back(page1);
  int extra = rng.uniform(1, 3);
  for (int p = 0; p < extra; ++p) {
    std::vector<std::string> page;
    page.push_back(p == 0 ? "Publications" : "Service");
    for (int l = 0; l < rng.uniform(8, 14); ++l) page.push_back("- " + sentence(rng, rng.uniform(3, 6)));
    d.pages.push_back(page);
  }
  d.byte_size = 1024 * rng.uniform(60, 200);
  return d;
}

inline doc::NormalizedDocument make_thesis_doc(const std::string& doc_id, Rng& rng) {
  doc::NormalizedDocument d;
  d.doc_id = doc_id;
  std::vector<std::string> page1;
  page1.push_back(cap(sentence(rng, rng.uniform(4, 7))));
  page1.push_back("A dissertation submitted in partial fulfillment");
  page1.push_back("Table of Contents");
  d.pages.push_back(page1);
  int chapters = rng.uniform(4, 6);
  for (int c = 0; c < chapters; ++c) {
    std::vector<std::string> page;
    page.push_back("Chapter " + std::to_string(c + 1));
    if (c == 0) page.push_back("In this thesis we " + sentence(rng, 8) + ".");
    for (int l = 0; l < rng.uniform(18, 26); ++l)
      page.push_back(cap(sentence(rng, rng.uniform(9, 13))) + ".");
    d.pages.push_back(page);
    // chapters span several pages
    for (int extra = 0; extra < rng.uniform(2, 4); ++extra) {
      std::vector<std::string> more;
      for (int l = 0; l < rng.uniform(18, 26); ++l)
        more.push_back(cap(sentence(rng, rng.uniform(9, 13))) + ".");
      d.pages.push_back(more);
    }
  }
  std::vector<std::string> last;
  last.push_back("Bibliography");
  for (int l = 0; l < rng.uniform(10, 18); ++l)
    last.push_back("[" + std::to_string(l + 1) + "] " + cap(sentence(rng, rng.uniform(6, 10))) + ".");
  d.pages.push_back(last);
  std::int64_t chars = 0;
  for (const auto& page : d.pages)
    for (const auto& line : page) chars += static_cast<std::int64_t>(line.size());
  d.byte_size = chars * 3 + 262144;
  return d;
}

inline doc::NormalizedDocument make_other_doc(const std::string& doc_id, Rng& rng) {
  doc::NormalizedDocument d;
  d.doc_id = doc_id;
  int n_pages = rng.uniform(2, 5);
  for (int p = 0; p < n_pages; ++p) {
    std::vector<std::string> page;
    page.push_back(p == 0 ? "Course Syllabus" : "Week " + std::to_string(p));
    for (int l = 0; l < rng.uniform(10, 16); ++l)
      page.push_back(cap(sentence(rng, rng.uniform(5, 9))) + ".");
    d.pages.push_back(page);
  }
  d.byte_size = 1024 * rng.uniform(30, 120);
  return d;
}

inline doc::NormalizedDocument make_doc(DocKind kind, const std::string& doc_id,
                                        const Paper* paper, const std::string& name, Rng& rng) {
  switch (kind) {
    case DocKind::paper: return make_paper_doc(doc_id, *paper, rng);
    case DocKind::slides: return make_slides_doc(doc_id, rng);
    case DocKind::cv: return make_cv_doc(doc_id, name, rng);
    case DocKind::thesis: return make_thesis_doc(doc_id, rng);
    case DocKind::other: return make_other_doc(doc_id, rng);
  }
  throw InvalidInputError("make_doc: bad kind");
}

}  // namespace detail

// One entry of the labeled homepage-search corpus.
struct GeneratedQuery {
  std::string name;
  int homepage_rank = 0;  // 1-based
  std::vector<search::SearchResult> results;
};

// Everything the generator decided, kept in memory so tests can reuse it
// without re-reading files.
struct GeneratedFixtures {
  FixtureSpec spec;
  std::vector<GeneratedQuery> ranker_queries;     // training/eval corpus
  std::vector<GeneratedQuery> pipeline_queries;   // authors with real sites
  std::vector<GeneratedQuery> title_queries;      // path 1 entries (name = title)
  std::vector<Author> pipeline_authors;
  std::vector<Paper> papers;
  std::vector<std::string> path1_titles;
  std::vector<std::string> path2_names;           // includes one no-result name
  nlohmann::json ground_truth;
  // mini-web: canonical-ish url -> (content_type, body)
  std::map<std::string, std::pair<std::string, std::string>> site;
  // classifier corpus
  std::vector<std::pair<int, doc::NormalizedDocument>> classifier_train;
  std::vector<std::pair<int, doc::NormalizedDocument>> classifier_test;
  std::vector<store::Target> targets;
  std::vector<std::string> excluded_domains;  // pipeline config should skip these
};

namespace detail {

struct SearchResultSpec {
  std::string url, title, snippet;
};

// Distractor result templates for an author-name query. Some carry the
// author's name in the URL (LinkedIn/DBLP style), which is exactly the noise
// that makes fracMatch alone insufficient.
inline SearchResultSpec make_distractor(const Author& a, Rng& rng, double name_noise) {
  std::string name = a.display();
  int kind = rng.uniform(0, 7);
  switch (kind) {
    case 0:
      if (rng.chance(name_noise))
        return {"https://www.linkedin.com/pub/" + a.first + "-" + a.last + "/" +
                    std::to_string(rng.uniform(1, 900)),
                name + " - LinkedIn",
                "View " + name + " professional profile on LinkedIn the largest network of professionals"};
      return {"https://www.linkedin.com/pub/profile/" + std::to_string(rng.uniform(1000, 9999)),
              name + " - LinkedIn",
              "View the professional profile of " + name + " on LinkedIn network of professionals"};
    case 1:
      if (rng.chance(name_noise))
        return {"http://dblp.uni-trier.de/pers/hd/" + a.last.substr(0, 1) + "/" + a.last,
                "dblp: " + name, "List of computer science publications by " + name};
      return {"http://dblp.uni-trier.de/pers/hd/x/" + std::to_string(rng.uniform(100, 999)),
              "dblp: " + name, "List of computer science publications by " + name};
    case 2:
      return {"https://scholar.google.com/citations?user=u" + std::to_string(rng.uniform(1000, 99999)),
              name + " - Google Scholar",
              "Cited by " + std::to_string(rng.uniform(50, 4000)) + " computer science articles"};
    case 3:
      return {"https://www.researchgate.net/profile/" + std::to_string(rng.uniform(1000, 9999)),
              name + " | ResearchGate", "Discover the publications and projects of " + name};
    case 4:
      return {"https://twitter.com/" + a.last + std::to_string(rng.uniform(1, 99)),
              name + " (@" + a.last + ") on Twitter", "The latest posts from " + name};
    case 5:
      if (rng.chance(name_noise))
        return {"http://" + rng.pick(univ_hosts()) + "/directory/" + a.last + ".html",
                "Faculty directory", "Directory listing for " + name + " department of computer science"};
      return {"http://" + rng.pick(univ_hosts()) + "/news/story" + std::to_string(rng.uniform(100, 999)) + ".html",
              "Department news", "Award announcement featuring " + name + " and colleagues at the university"};
    case 6:
      return {"https://www.slideshare.net/deck/" + std::to_string(rng.uniform(1000, 9999)),
              sentence(rng, 4) + " slides", "Slide deck mentioning " + name};
    default:
      return {"https://www.facebook.com/people/" + std::to_string(rng.uniform(10000, 99999)),
              name + " - Facebook", "See posts and photos from " + name};
  }
}

inline SearchResultSpec make_homepage_result(const Author& a, const std::string& url, Rng& rng,
                                             bool weak_signal) {
  std::string name = a.display();
  if (weak_signal)
    return {url, name, "Recent notes and material by " + name};
  std::string title = rng.chance(0.5) ? name + " - Home Page" : "Homepage of " + name;
  std::string snippet = rng.chance(0.5)
                            ? "Professor of computer science at the university department of research"
                            : name + " professor university research publications and teaching";
  return {url, title, snippet};
}

inline std::string homepage_url(const Author& a, Rng& rng) {
  int style = rng.uniform(0, 2);
  if (style == 0) return "http://" + rng.pick(univ_hosts()) + "/~" + a.last + "/";
  if (style == 1) return "http://" + rng.pick(univ_hosts()) + "/people/" + a.first + a.last + "/";
  return "http://www." + a.first + "-" + a.last + ".org/";
}

inline GeneratedQuery make_labeled_query(const Author& a, const std::string& home_url, Rng& rng,
                                         const FixtureSpec& spec) {
  GeneratedQuery q;
  q.name = a.display();
  int n_results = spec.top_k;
  q.homepage_rank = rng.uniform(1, n_results);
  bool weak = rng.chance(spec.weak_homepage_signal);
  // Occasionally a stale mirror of the homepage on another host outranks or
  // trails the real one; it reuses the homepage templates so only the host
  // tokens can tell them apart.
  int mirror_rank = 0;
  if (rng.chance(spec.homepage_mirror_rate)) {
    do {
      mirror_rank = rng.uniform(1, n_results);
    } while (mirror_rank == q.homepage_rank);
  }
  for (int r = 1; r <= n_results; ++r) {
    SearchResultSpec s;
    if (r == q.homepage_rank)
      s = make_homepage_result(a, home_url, rng, weak);
    else if (r == mirror_rank) {
      std::string mirror_url;
      do {
        mirror_url = "http://" + rng.pick(univ_hosts()) + "/~" + a.last + "/";
      } while (mirror_url == home_url);
      s = make_homepage_result(a, mirror_url, rng, weak);
    }
    else
      s = make_distractor(a, rng, spec.distractor_name_noise);
    search::SearchResult sr;
    sr.rank = r;
    sr.url = s.url;
    sr.page_title = s.title;
    sr.snippet = s.snippet;
    q.results.push_back(std::move(sr));
  }
  return q;
}

inline std::string slugify(const std::string& title) {
  std::string slug;
  for (const auto& tok : text::tokenize(title)) {
    if (!slug.empty()) slug += "-";
    slug += tok;
  }
  return slug;
}

}  // namespace detail

// The full generation pass. File emission is a thin serialization of the
// returned structure, so in-process tests and the CLI see identical data.
inline GeneratedFixtures generate(const FixtureSpec& spec) {
  detail::Rng rng(spec.seed);
  GeneratedFixtures out;
  out.spec = spec;
  out.excluded_domains = {"excluded-library.org"};

  // distinct author names, ranker and pipeline slices disjoint
  std::vector<Author> all_authors;
  for (const auto& f : detail::first_names())
    for (const auto& l : detail::last_names()) all_authors.push_back({f, l});
  std::shuffle(all_authors.begin(), all_authors.end(), rng.engine());
  int needed = spec.n_authors + spec.n_pipeline_authors;
  if (needed > static_cast<int>(all_authors.size()))
    throw InvalidInputError("fixture spec: too many authors for the name pool");

  // --- ranker corpus ---
  for (int i = 0; i < spec.n_authors; ++i) {
    const Author& a = all_authors[static_cast<std::size_t>(i)];
    out.ranker_queries.push_back(
        detail::make_labeled_query(a, detail::homepage_url(a, rng), rng, spec));
  }

  // --- pipeline authors get dedicated hosts so crawl scopes are disjoint ---
  for (int i = 0; i < spec.n_pipeline_authors; ++i)
    out.pipeline_authors.push_back(all_authors[static_cast<std::size_t>(spec.n_authors + i)]);

  std::vector<std::string> hosts;
  for (int i = 0; i < spec.n_pipeline_authors; ++i)
    hosts.push_back("www." + out.pipeline_authors[static_cast<std::size_t>(i)].last +
                    std::to_string(i) + ".edu");

  // --- papers ---
  std::set<std::string> used_titles;
  for (int i = 0; i < spec.n_papers; ++i) {
    Paper p;
    p.id = "paper" + std::to_string(i);
    do {
      p.title = rng.pick(detail::title_adjectives()) + " " + rng.pick(detail::title_nouns()) +
                " for " + rng.pick(detail::title_domains());
      if (used_titles.count(p.title)) p.title += " Revisited";
    } while (!used_titles.insert(p.title).second);
    if (spec.n_pipeline_authors > 0 && !rng.chance(0.10)) {
      p.owner = i % spec.n_pipeline_authors;
      p.author_names.push_back(
          out.pipeline_authors[static_cast<std::size_t>(p.owner)].display());
      if (rng.chance(0.4))
        p.author_names.push_back(
            out.pipeline_authors[static_cast<std::size_t>((p.owner + 1) % spec.n_pipeline_authors)]
                .display());
      p.deep = rng.chance(0.12);  // linked only below crawl depth
    } else {
      p.owner = -1;  // unhosted: exists as a title, not on the mini-web
      p.author_names.push_back(all_authors[static_cast<std::size_t>(i % needed)].display());
    }
    out.papers.push_back(std::move(p));
  }

  // --- mini-web ---
  // layout per author site (H = homepage dir):
  //   H/                  homepage (depth 0)
  //   H/papers.html       publication list (depth 1)
  //   H/pubs/<slug>.pdf   papers: some linked from H, the rest from papers.html
  //   H/cv.pdf            non-paper document
  //   H/misc.html         depth-2 page whose links are beyond the depth budget
  //   H/private/notes.pdf robots-disallowed on every fifth site
  // plus a cross-domain mirror (mirror-archive.org) serving identical bytes.
  auto doc_bytes = [](const doc::NormalizedDocument& d) { return doc::document_to_json(d).dump(); };

  struct SitePlan {
    std::string home;                           // canonical homepage URL
    std::vector<std::string> depth1_pdfs;       // linked from homepage
    std::vector<std::string> depth2_pdfs;       // linked from papers.html
    std::vector<std::string> skipped_scope;     // off-domain html links
    std::vector<std::string> skipped_robots;    // robots-disallowed links
    std::string papers_page, misc_page;
    std::map<std::string, const Paper*> pdf_paper;  // url -> paper (nullptr for cv)
  };
  std::vector<SitePlan> plans;

  std::map<std::string, std::string> paper_pdf_bytes;  // paper id -> serialized doc
  for (const auto& paper : out.papers) {
    if (paper.owner < 0) continue;
    paper_pdf_bytes[paper.id] =
        doc_bytes(detail::make_paper_doc("web-" + paper.id, paper, rng));
  }

  for (int i = 0; i < spec.n_pipeline_authors; ++i) {
    const Author& a = out.pipeline_authors[static_cast<std::size_t>(i)];
    const std::string& host = hosts[static_cast<std::size_t>(i)];
    SitePlan plan;
    plan.home = "http://" + host + "/~" + a.last + "/";
    plan.papers_page = plan.home + "papers.html";
    plan.misc_page = plan.home + "misc.html";
    bool has_robots = i % 5 == 0;

    std::vector<const Paper*> own, deep;
    for (const auto& paper : out.papers) {
      if (paper.owner != i) continue;
      (paper.deep ? deep : own).push_back(&paper);
    }

    std::string home_html = "<html><body><h1>" + a.display() + "</h1>\n";
    home_html += "<a href=\"papers.html\">publications</a>\n";
    std::string papers_html = "<html><body><h2>Publications</h2>\n";

    for (std::size_t k = 0; k < own.size(); ++k) {
      const Paper* paper = own[k];
      std::string pdf_url = plan.home + "pubs/" + detail::slugify(paper->title) + ".pdf";
      out.site[pdf_url] = {"application/pdf", paper_pdf_bytes.at(paper->id)};
      plan.pdf_paper[pdf_url] = paper;
      if (k == 0) {  // first paper linked straight from the homepage
        home_html += "<a href=\"pubs/" + detail::slugify(paper->title) + ".pdf\">" +
                     paper->title + "</a>\n";
        plan.depth1_pdfs.push_back(pdf_url);
        // the same bytes on a mirror domain, reachable cross-domain
        std::string mirror = "http://mirror-archive.org/" + detail::slugify(paper->title) + ".pdf";
        out.site[mirror] = {"application/pdf", paper_pdf_bytes.at(paper->id)};
        plan.pdf_paper[mirror] = paper;
        home_html += "<a href=\"" + mirror + "\">mirror</a>\n";
        plan.depth1_pdfs.push_back(mirror);
      } else {
        papers_html += "<a href=\"pubs/" + detail::slugify(paper->title) + ".pdf\">" +
                       paper->title + "</a>\n";
        plan.depth2_pdfs.push_back(pdf_url);
      }
    }

    std::string cv_url = plan.home + "cv.pdf";
    out.site[cv_url] = {"application/pdf",
                        doc_bytes(detail::make_cv_doc("cv-" + a.last, a.display(), rng))};
    plan.pdf_paper[cv_url] = nullptr;
    home_html += "<a href=\"cv.pdf\">CV</a>\n";
    plan.depth1_pdfs.push_back(cv_url);

    std::string linkedin = "https://www.linkedin.com/pub/" + a.first + "-" + a.last + "/1";
    home_html += "<a href=\"" + linkedin + "\">linkedin</a>\n";
    plan.skipped_scope.push_back(linkedin);

    if (has_robots) {
      out.site["http://" + host + "/robots.txt"] = {
          "text/plain", "User-agent: *\nDisallow: /~" + a.last + "/private/\n"};
      std::string private_pdf = plan.home + "private/notes.pdf";
      out.site[private_pdf] = {"application/pdf",
                               doc_bytes(detail::make_other_doc("private-" + a.last, rng))};
      home_html += "<a href=\"private/notes.pdf\">drafts</a>\n";
      plan.skipped_robots.push_back(private_pdf);
    }

    papers_html += "<a href=\"misc.html\">misc</a>\n</body></html>\n";
    std::string misc_html = "<html><body>\n";
    for (const Paper* paper : deep) {
      std::string deep_url = plan.home + "pubs/deep-" + detail::slugify(paper->title) + ".pdf";
      out.site[deep_url] = {"application/pdf", paper_pdf_bytes.at(paper->id)};
      misc_html += "<a href=\"pubs/deep-" + detail::slugify(paper->title) + ".pdf\">" +
                   paper->title + "</a>\n";
      // depth 3 from the seed: enumerated as unreachable
    }
    misc_html += "</body></html>\n";
    home_html += "</body></html>\n";

    out.site[plan.home] = {"text/html", home_html};
    out.site[plan.papers_page] = {"text/html", papers_html};
    out.site[plan.misc_page] = {"text/html", misc_html};
    plans.push_back(std::move(plan));
  }

  // --- pipeline author search entries (clean: distractors carry no name URLs) ---
  for (int i = 0; i < spec.n_pipeline_authors; ++i) {
    const Author& a = out.pipeline_authors[static_cast<std::size_t>(i)];
    FixtureSpec clean = spec;
    clean.distractor_name_noise = 0.0;
    clean.weak_homepage_signal = 0.0;
    clean.homepage_mirror_rate = 0.0;
    GeneratedQuery q = detail::make_labeled_query(a, plans[static_cast<std::size_t>(i)].home,
                                                  rng, clean);
    out.pipeline_queries.push_back(std::move(q));
    out.path2_names.push_back(a.display());
  }
  // one author whose query legitimately returns nothing
  out.path2_names.push_back("Zero Resultson");
  GeneratedQuery empty_q;
  empty_q.name = "Zero Resultson";
  empty_q.homepage_rank = 0;
  out.pipeline_queries.push_back(empty_q);

  // --- path 1 search entries ---
  struct Path1Result {
    std::string url;
    bool excluded = false;
    const Paper* paper = nullptr;  // nullptr = non-paper pdf
  };
  std::map<std::string, std::vector<Path1Result>> path1_results;  // title -> results
  for (auto& paper : out.papers) {
    out.path1_titles.push_back(paper.title);
    std::vector<Path1Result>& results = path1_results[paper.title];
    if (paper.owner >= 0) {
      const SitePlan& plan = plans[static_cast<std::size_t>(paper.owner)];
      std::string slug = detail::slugify(paper.title);
      std::string pdf_url = plan.home + "pubs/" + (paper.deep ? "deep-" : "") + slug + ".pdf";
      results.push_back({pdf_url, false, &paper});
      paper.reachable_path1 = true;
      if (rng.chance(0.3)) {  // slide deck for the talk, a non-paper pdf
        std::string slides_url = plan.home + "slides/" + slug + "-talk.pdf";
        out.site[slides_url] = {"application/pdf",
                                doc_bytes(detail::make_slides_doc("talk-" + paper.id, rng))};
        results.push_back({slides_url, false, nullptr});
      }
      if (rng.chance(0.25)) {  // result on the excluded library, must be skipped
        std::string excl = "http://excluded-library.org/docs/" + slug + ".pdf";
        out.site[excl] = {"application/pdf", paper_pdf_bytes.at(paper.id)};
        results.push_back({excl, true, &paper});
      }
    } else if (rng.chance(0.5)) {
      // unhosted paper whose only result sits on the excluded domain
      std::string excl = "http://excluded-library.org/docs/" + detail::slugify(paper.title) + ".pdf";
      out.site[excl] = {"application/pdf",
                        doc_bytes(detail::make_paper_doc("excl-" + paper.id, paper, rng))};
      results.push_back({excl, true, &paper});
    }
    // else: empty result list; the query is issued and yields nothing
  }

  // --- classifier corpus ---
  {
    int n = spec.n_classifier_docs;
    std::vector<std::pair<int, doc::NormalizedDocument>> docs;
    for (int i = 0; i < n; ++i) {
      DocKind kind;
      if (i % 2 == 0) {
        kind = DocKind::paper;
      } else {
        DocKind negatives[4] = {DocKind::slides, DocKind::cv, DocKind::thesis, DocKind::other};
        kind = negatives[(i / 2) % 4];
      }
      Paper synth;
      synth.title = detail::cap(detail::sentence(rng, rng.uniform(4, 8)));
      synth.author_names.push_back(rng.pick(all_authors).display());
      std::string name = rng.pick(all_authors).display();
      docs.emplace_back(doc_label(kind),
                        detail::make_doc(kind, "cls" + std::to_string(i), &synth, name, rng));
    }
    std::shuffle(docs.begin(), docs.end(), rng.engine());
    std::size_t half = docs.size() / 2;
    out.classifier_train.assign(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(half));
    out.classifier_test.assign(docs.begin() + static_cast<std::ptrdiff_t>(half), docs.end());
  }

  // --- targets ---
  for (const auto& paper : out.papers)
    out.targets.push_back({paper.id, paper.title, paper.author_names});

  // --- ground truth enumeration ---
  // Counting rules mirror the pipeline's manifest: pdfs/papers count fetch
  // events, unique titles count distinct normalized titles of paper docs,
  // matches count targets with at least one acquired matching record.
  nlohmann::json gt;
  {
    store::Manifest m;
    std::set<std::string> t1, t2;
    std::set<std::string> matched1, matched2;

    m.path1.queries_issued = static_cast<std::int64_t>(out.path1_titles.size());
    for (const auto& paper : out.papers) {
      for (const auto& r : path1_results.at(paper.title)) {
        if (r.excluded) continue;
        ++m.path1.pdfs_fetched;
        if (r.paper) {
          ++m.path1.papers_classified;
          ++m.histogram(store::AcquisitionPath::path1_search)[store::top_level_domain(r.url)];
          t1.insert(text::normalize(r.paper->title));
          matched1.insert(r.paper->id);
        }
      }
    }

    m.path2.queries_issued = static_cast<std::int64_t>(out.path2_names.size());
    for (const auto& plan : plans) {
      std::vector<std::string> pdfs = plan.depth1_pdfs;
      pdfs.insert(pdfs.end(), plan.depth2_pdfs.begin(), plan.depth2_pdfs.end());
      for (const auto& url : pdfs) {
        ++m.path2.pdfs_fetched;
        const Paper* paper = plan.pdf_paper.at(url);
        if (paper) {
          ++m.path2.papers_classified;
          ++m.histogram(store::AcquisitionPath::path2_crawl)[store::top_level_domain(url)];
          t2.insert(text::normalize(paper->title));
          matched2.insert(paper->id);
        }
      }
    }

    m.path1.unique_titles = static_cast<std::int64_t>(t1.size());
    m.path2.unique_titles = static_cast<std::int64_t>(t2.size());
    std::int64_t overlap = 0;
    for (const auto& t : t1)
      if (t2.count(t)) ++overlap;
    m.title_overlap = overlap;
    m.path1.target_matches = static_cast<std::int64_t>(matched1.size());
    m.path2.target_matches = static_cast<std::int64_t>(matched2.size());

    std::set<std::string> recovered = matched1;
    recovered.insert(matched2.begin(), matched2.end());
    gt["manifest"] = store::manifest_to_json(m);
    gt["recovered_targets"] = recovered.size();
    gt["total_targets"] = out.targets.size();
    gt["recovered_fraction"] = out.targets.empty()
                                   ? 0.0
                                   : static_cast<double>(recovered.size()) /
                                         static_cast<double>(out.targets.size());

    // per-seed crawl enumeration for the crawler acceptance check
    nlohmann::json crawl_gt = nlohmann::json::object();
    for (const auto& plan : plans) {
      nlohmann::json seed;
      seed["fetched_html"] = {plan.home, plan.papers_page, plan.misc_page};
      seed["fetched_pdf"] = plan.depth1_pdfs;
      for (const auto& u : plan.depth2_pdfs) seed["fetched_pdf"].push_back(u);
      seed["skipped_scope"] = plan.skipped_scope;
      seed["skipped_robots"] = plan.skipped_robots;
      crawl_gt[plan.home] = std::move(seed);
    }
    gt["crawl_seeds"] = std::move(crawl_gt);
  }
  out.ground_truth = std::move(gt);

  // path 1 search fixture entries live in the same structure as the author
  // queries; serialize them here so files and in-memory views agree
  for (const auto& paper : out.papers) {
    GeneratedQuery q;
    q.name = paper.title;  // reused field: the raw query text
    q.homepage_rank = 0;
    int rank = 1;
    for (const auto& r : path1_results.at(paper.title)) {
      search::SearchResult sr;
      sr.rank = rank++;
      sr.url = r.url;
      sr.page_title = paper.title;
      sr.snippet = "PDF";
      q.results.push_back(std::move(sr));
    }
    out.title_queries.push_back(std::move(q));
  }

  return out;
}

// --- file emission ---

inline void write_fixture_files(const GeneratedFixtures& g, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw IoError(std::string("generate_fixtures: cannot write ") + name);
    return out;
  };

  {
    auto out = open("search_fixture.jsonl");
    auto emit = [&](const std::string& rendered, const std::vector<search::SearchResult>& results) {
      nlohmann::json j;
      j["q"] = rendered;
      auto& arr = j["results"] = nlohmann::json::array();
      for (const auto& r : results)
        arr.push_back(
            {{"rank", r.rank}, {"url", r.url}, {"title", r.page_title}, {"snippet", r.snippet}});
      out << j.dump() << "\n";
    };
    for (const auto& q : g.ranker_queries)
      emit("\"" + q.name + "\" filetype:html", q.results);
    for (const auto& q : g.pipeline_queries)
      emit("\"" + q.name + "\" filetype:html", q.results);
    for (const auto& q : g.title_queries)
      emit("\"" + q.name + "\" filetype:pdf", q.results);
  }
  {
    auto out = open("ranker_labels.json");
    nlohmann::json j = nlohmann::json::array();
    for (const auto& q : g.ranker_queries)
      j.push_back({{"name", q.name}, {"homepage_rank", q.homepage_rank}});
    out << j.dump(2) << "\n";
  }
  {
    auto out = open("site.json");
    nlohmann::json pages = nlohmann::json::object();
    for (const auto& [url, page] : g.site)
      pages[url] = {{"content_type", page.first}, {"body", page.second}};
    out << nlohmann::json{{"pages", std::move(pages)}}.dump() << "\n";
  }
  auto write_docs = [&](const char* name,
                        const std::vector<std::pair<int, doc::NormalizedDocument>>& docs) {
    auto out = open(name);
    for (const auto& [label, d] : docs)
      out << nlohmann::json{{"label", label}, {"doc", doc::document_to_json(d)}}.dump() << "\n";
  };
  write_docs("classifier_train.jsonl", g.classifier_train);
  write_docs("classifier_test.jsonl", g.classifier_test);
  {
    auto out = open("titles.txt");
    for (const auto& t : g.path1_titles) out << t << "\n";
  }
  {
    auto out = open("authors.txt");
    for (const auto& n : g.path2_names) out << n << "\n";
  }
  {
    auto out = open("targets.json");
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : g.targets)
      j.push_back({{"id", t.id}, {"title", t.title}, {"authors", t.authors}});
    out << j.dump(2) << "\n";
  }
  {
    auto out = open("ground_truth.json");
    out << g.ground_truth.dump(2) << "\n";
  }
}

inline GeneratedFixtures generate_fixtures(const FixtureSpec& spec,
                                           const std::filesystem::path& out_dir) {
  GeneratedFixtures g = generate(spec);
  write_fixture_files(g, out_dir);
  return g;
}

}  // namespace paperharvest::fixtures
