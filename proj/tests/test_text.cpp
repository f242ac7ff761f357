#include <catch2/catch_amalgamated.hpp>

#include "paperharvest/text.hpp"

using namespace paperharvest;

TEST_CASE("collapse_whitespace trims and squeezes") {
  CHECK(text::collapse_whitespace("  a \t b\n\nc  ") == "a b c");
  CHECK(text::collapse_whitespace("") == "");
  CHECK(text::collapse_whitespace(" \t\n ") == "");
  CHECK(text::collapse_whitespace("already clean") == "already clean");
}

TEST_CASE("normalize lowercases and strips punctuation without merging words") {
  CHECK(text::normalize("Self-Taught, Learning!") == "self taught learning");
  CHECK(text::normalize("A--B") == "a b");
  CHECK(text::normalize("  MiXeD  CaSe ") == "mixed case");
  CHECK(text::normalize("42nd street") == "42nd street");
}

TEST_CASE("normalize is idempotent") {
  auto seed = GENERATE(as<std::string>{}, "Hello, World!", "a-b-c", "  x  ", "UPPER lower 123",
                       "punct...only???", "");
  auto once = text::normalize(seed);
  CHECK(text::normalize(once) == once);
}

TEST_CASE("split_words and count_words agree") {
  auto s = GENERATE(as<std::string>{}, "", "one", "one two", "  padded   words  ", "a\tb\nc");
  CHECK(text::split_words(s).size() == text::count_words(s));
}

TEST_CASE("tokenize produces lowercase alphanumeric tokens") {
  CHECK(text::tokenize("John's Home-Page (v2)") ==
        std::vector<std::string>{"john", "s", "home", "page", "v2"});
  CHECK(text::tokenize("") == std::vector<std::string>{});
}

TEST_CASE("split preserves empty fields") {
  CHECK(text::split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(text::split("", ',') == std::vector<std::string>{""});
  CHECK(text::split("x", ',') == std::vector<std::string>{"x"});
  CHECK(text::split(",", ',') == std::vector<std::string>{"", ""});
}

TEST_CASE("case-insensitive helpers") {
  CHECK(text::starts_with_ci("Abstract of the work", "abstract"));
  CHECK_FALSE(text::starts_with_ci("ab", "abstract"));
  CHECK(text::contains_ci("The QUICK fox", "quick"));
  CHECK(text::contains_ci("anything", ""));
  CHECK_FALSE(text::contains_ci("", "x"));
}
