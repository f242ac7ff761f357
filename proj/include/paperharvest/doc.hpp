#pragma once

// Page/line text model for harvested documents, structural feature
// extraction for the paper classifier, and first-page title handling.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "paperharvest/errors.hpp"
#include "paperharvest/text.hpp"

namespace paperharvest::doc {

struct NormalizedDocument {
  std::string doc_id;
  std::int64_t byte_size = 0;
  std::vector<std::vector<std::string>> pages;  // pages of lines, no line breaks inside
};

// Pre-extracted fixture format: {"doc_id": str, "byte_size": int, "pages": [[line,...],...]}
inline NormalizedDocument document_from_json(const nlohmann::json& j) {
  NormalizedDocument d;
  d.doc_id = j.at("doc_id").get<std::string>();
  d.byte_size = j.at("byte_size").get<std::int64_t>();
  for (const auto& pj : j.at("pages")) {
    std::vector<std::string> page;
    for (const auto& lj : pj) {
      std::string line = lj.get<std::string>();
      // strip stray CR from CRLF sources
      while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
      page.push_back(std::move(line));
    }
    d.pages.push_back(std::move(page));
  }
  if (d.pages.empty()) throw UnparseableDocumentError("document " + d.doc_id + ": no pages");
  return d;
}

inline nlohmann::json document_to_json(const NormalizedDocument& d) {
  return {{"doc_id", d.doc_id}, {"byte_size", d.byte_size}, {"pages", d.pages}};
}

// Adapter contract for raw PDF bytes: bytes in, the fixture JSON shape out.
class TextExtractor {
 public:
  virtual ~TextExtractor() = default;
  virtual NormalizedDocument extract(const std::string& bytes) = 0;
};

// Fixture input (the pre-extracted JSON, detected by a leading '{') bypasses
// the extractor entirely; anything else requires one.
inline NormalizedDocument ingest_document(const std::string& source,
                                          TextExtractor* extractor = nullptr) {
  if (source.empty()) throw UnparseableDocumentError("ingest: empty source");
  std::size_t first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') {
    try {
      return document_from_json(nlohmann::json::parse(source));
    } catch (const nlohmann::json::exception& e) {
      throw UnparseableDocumentError(std::string("ingest: bad fixture json: ") + e.what());
    }
  }
  if (!extractor) throw UnparseableDocumentError("ingest: raw bytes but no text extractor configured");
  try {
    return extractor->extract(source);
  } catch (const UnparseableDocumentError&) {
    throw;
  } catch (const std::exception& e) {
    throw UnparseableDocumentError(std::string("ingest: extraction failed: ") + e.what());
  }
}

// --- structural features ---

inline constexpr int kStructuralFeatureCount = 24;

inline const std::array<std::string, kStructuralFeatureCount>& structural_feature_names() {
  static const std::array<std::string, kStructuralFeatureCount> names = {
      "byte_size_kb",
      "page_count",
      "total_words",
      "total_lines",
      "avg_words_per_page",
      "avg_lines_per_page",
      "frac_short_lines",
      "frac_upper_lines",
      "count_numbered_section_headings",
      "count_bullet_lines",
      "contains_this_paper",
      "contains_this_thesis",
      "contains_this_book",
      "contains_abstract_heading",
      "contains_introduction_heading",
      "contains_acknowledgments",
      "contains_references_or_bibliography",
      "contains_cv_marker",
      "contains_chapter_marker",
      "contains_table_of_contents",
      "relpos_introduction",
      "relpos_acknowledgments",
      "relpos_references",
      "count_email_or_url_tokens",
  };
  return names;
}

struct StructuralFeatures {
  std::array<double, kStructuralFeatureCount> values{};

  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double at_name(const std::string& name) const {
    const auto& names = structural_feature_names();
    for (int i = 0; i < kStructuralFeatureCount; ++i)
      if (names[static_cast<std::size_t>(i)] == name) return values[static_cast<std::size_t>(i)];
    throw InvalidInputError("unknown structural feature: " + name);
  }
};

namespace detail {

inline bool line_is_numbered_heading(const std::string& line) {
  std::size_t i = 0;
  if (i >= line.size() || !std::isdigit(static_cast<unsigned char>(line[i]))) return false;
  while (i < line.size()) {
    if (std::isdigit(static_cast<unsigned char>(line[i]))) {
      ++i;
    } else if (line[i] == '.' && i + 1 < line.size() &&
               std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
      i += 2;
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    } else {
      break;
    }
  }
  if (i < line.size() && (line[i] == '.' || line[i] == ')')) ++i;
  if (i >= line.size() || line[i] != ' ') return false;
  while (i < line.size() && line[i] == ' ') ++i;
  return i < line.size() && std::isalpha(static_cast<unsigned char>(line[i]));
}

inline bool line_is_bullet(const std::string& line) {
  if (line.empty()) return false;
  if (line[0] == '-' || line[0] == '*') return line.size() > 1 && line[1] == ' ';
  // UTF-8 bullets
  return line.rfind("\xe2\x80\xa2", 0) == 0 || line.rfind("\xc2\xb7", 0) == 0;
}

inline bool all_alpha_upper(const std::string& line) {
  bool saw_alpha = false;
  for (unsigned char c : line) {
    if (std::isalpha(c)) {
      saw_alpha = true;
      if (std::islower(c)) return false;
    }
  }
  return saw_alpha;
}

inline bool token_is_email_or_url(const std::string& tok) {
  if (tok.find('@') != std::string::npos && tok.find('.') != std::string::npos) return true;
  return text::starts_with_ci(tok, "http://") || text::starts_with_ci(tok, "https://") ||
         text::starts_with_ci(tok, "www.");
}

}  // namespace detail

// Heading detection is prefix-based on the normalized line; relative section
// positions are first-line-index / total-lines with -1 when a section is
// absent (0 is a legitimate position).
inline StructuralFeatures extract_structural_features(const NormalizedDocument& d) {
  StructuralFeatures f;
  auto& v = f.values;

  std::int64_t total_lines = 0;
  std::int64_t total_words = 0;
  std::int64_t short_lines = 0;
  std::int64_t upper_lines = 0;
  std::int64_t nonempty_lines = 0;
  std::int64_t numbered_headings = 0;
  std::int64_t bullets = 0;
  std::int64_t email_url_tokens = 0;

  bool this_paper = false, this_thesis = false, this_book = false;
  bool abstract_h = false, intro_h = false, ack_h = false, refs_h = false;
  bool cv_marker = false, chapter_marker = false, toc_marker = false;
  std::int64_t intro_line = -1, ack_line = -1, refs_line = -1;

  std::int64_t line_index = 0;
  for (const auto& page : d.pages) {
    for (const auto& line : page) {
      std::size_t words = text::count_words(line);
      total_words += static_cast<std::int64_t>(words);
      ++total_lines;
      if (!line.empty()) {
        ++nonempty_lines;
        if (words < 4) ++short_lines;
        if (detail::all_alpha_upper(line)) ++upper_lines;
        if (detail::line_is_numbered_heading(line)) ++numbered_headings;
        if (detail::line_is_bullet(line)) ++bullets;
      }
      for (const auto& tok : text::split_words(line))
        if (detail::token_is_email_or_url(tok)) ++email_url_tokens;

      std::string norm = text::normalize(line);
      if (norm.find("this paper") != std::string::npos) this_paper = true;
      if (norm.find("this thesis") != std::string::npos) this_thesis = true;
      if (norm.find("this book") != std::string::npos) this_book = true;
      if (norm.find("curriculum vitae") != std::string::npos ||
          norm == "resume" || norm.rfind("resume ", 0) == 0)
        cv_marker = true;
      if (norm.rfind("chapter ", 0) == 0) chapter_marker = true;
      if (norm == "contents" || norm.find("table of contents") != std::string::npos)
        toc_marker = true;

      auto heading = [&](const char* word) {
        return norm == word || norm.rfind(std::string(word) + " ", 0) == 0;
      };
      if (heading("abstract")) abstract_h = true;
      if (heading("introduction")) {
        intro_h = true;
        if (intro_line < 0) intro_line = line_index;
      }
      if (heading("acknowledgments") || heading("acknowledgements")) {
        ack_h = true;
        if (ack_line < 0) ack_line = line_index;
      }
      if (heading("references") || heading("bibliography")) {
        refs_h = true;
        if (refs_line < 0) refs_line = line_index;
      }
      ++line_index;
    }
  }

  double pages = static_cast<double>(d.pages.size());
  double lines_d = static_cast<double>(total_lines);
  v[0] = static_cast<double>(d.byte_size) / 1024.0;
  v[1] = pages;
  v[2] = static_cast<double>(total_words);
  v[3] = lines_d;
  v[4] = static_cast<double>(total_words) / pages;
  v[5] = lines_d / pages;
  v[6] = nonempty_lines > 0 ? static_cast<double>(short_lines) / static_cast<double>(nonempty_lines) : 0.0;
  v[7] = nonempty_lines > 0 ? static_cast<double>(upper_lines) / static_cast<double>(nonempty_lines) : 0.0;
  v[8] = static_cast<double>(numbered_headings);
  v[9] = static_cast<double>(bullets);
  v[10] = this_paper ? 1.0 : 0.0;
  v[11] = this_thesis ? 1.0 : 0.0;
  v[12] = this_book ? 1.0 : 0.0;
  v[13] = abstract_h ? 1.0 : 0.0;
  v[14] = intro_h ? 1.0 : 0.0;
  v[15] = ack_h ? 1.0 : 0.0;
  v[16] = refs_h ? 1.0 : 0.0;
  v[17] = cv_marker ? 1.0 : 0.0;
  v[18] = chapter_marker ? 1.0 : 0.0;
  v[19] = toc_marker ? 1.0 : 0.0;
  v[20] = intro_line >= 0 && total_lines > 0 ? static_cast<double>(intro_line) / lines_d : -1.0;
  v[21] = ack_line >= 0 && total_lines > 0 ? static_cast<double>(ack_line) / lines_d : -1.0;
  v[22] = refs_line >= 0 && total_lines > 0 ? static_cast<double>(refs_line) / lines_d : -1.0;
  v[23] = static_cast<double>(email_url_tokens);
  return f;
}

// --- titles ---

struct TitleRecord {
  std::string raw;
  std::string normalized;
};

inline TitleRecord make_title_record(const std::string& raw) {
  return {raw, text::normalize(raw)};
}

// Earliest block of 1-3 consecutive non-empty page-1 lines, cut off at the
// "abstract" heading, whose joined text has 3-30 words; the shortest
// qualifying block at the earliest start wins. Falls back to the first
// non-empty line.
inline TitleRecord extract_title_heuristic(const NormalizedDocument& d) {
  const auto& page1 = d.pages.at(0);
  std::size_t limit = page1.size();
  for (std::size_t i = 0; i < page1.size(); ++i) {
    if (text::normalize(page1[i]) == "abstract") {
      limit = i;
      break;
    }
  }
  std::optional<std::string> first_nonempty;
  for (std::size_t start = 0; start < limit; ++start) {
    if (text::normalize(page1[start]).empty()) continue;
    if (!first_nonempty) first_nonempty = page1[start];
    std::string joined;
    for (std::size_t len = 1; len <= 3 && start + len <= limit; ++len) {
      const std::string& line = page1[start + len - 1];
      if (text::normalize(line).empty()) break;
      if (!joined.empty()) joined += " ";
      joined += line;
      std::size_t words = text::count_words(joined);
      if (words >= 3 && words <= 30) return make_title_record(text::collapse_whitespace(joined));
      if (words > 30) break;
    }
  }
  if (!first_nonempty) {
    // nothing before "abstract": consider the rest of the page for fallback
    for (const auto& line : page1)
      if (!text::normalize(line).empty()) {
        first_nonempty = line;
        break;
      }
  }
  if (!first_nonempty) throw NoTitleError("title heuristic: empty first page in " + d.doc_id);
  return make_title_record(text::collapse_whitespace(*first_nonempty));
}

// True iff the normalized title appears in the normalized first-page text
// and at least one author's final name token appears there too.
inline bool match_title(const NormalizedDocument& d, const std::string& title,
                        const std::vector<std::string>& authors) {
  if (title.empty()) throw InvalidInputError("match_title: empty title");
  std::string page_text;
  for (const auto& line : d.pages.at(0)) {
    page_text += line;
    page_text += " ";
  }
  std::string norm_page = " " + text::normalize(page_text) + " ";
  std::string norm_title = text::normalize(title);
  if (norm_title.empty() || norm_page.find(norm_title) == std::string::npos) return false;
  for (const auto& author : authors) {
    auto toks = text::tokenize(author);
    if (toks.empty()) continue;
    if (norm_page.find(" " + toks.back() + " ") != std::string::npos) return true;
  }
  return false;
}

}  // namespace paperharvest::doc
