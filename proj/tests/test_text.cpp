#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "contracheck/text.hpp"

using namespace contracheck;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& ss) {
  std::vector<std::string> out;
  for (const auto& s : ss) out.push_back(s.text);
  return out;
}

std::string non_ws(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (!ascii_space(c)) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("segmentation splits on terminators followed by an uppercase start") {
  CHECK(texts(segment_sentences("A b. C d? E!")) ==
        std::vector<std::string>{"A b.", "C d?", "E!"});
}

TEST_CASE("segmentation of empty and whitespace-only input") {
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("   \n\t ").empty());
}

TEST_CASE("abbreviations do not end sentences") {
  CHECK(texts(segment_sentences("Dr. Smith arrived. He left.")) ==
        std::vector<std::string>{"Dr. Smith arrived.", "He left."});
  CHECK(texts(segment_sentences("Cats vs. Dogs was fun. We watched it.")) ==
        std::vector<std::string>{"Cats vs. Dogs was fun.", "We watched it."});
  CHECK(texts(segment_sentences("See e.g. Newton. It holds.")) ==
        std::vector<std::string>{"See e.g. Newton.", "It holds."});
  // leading punctuation before the abbreviation is ignored
  CHECK(texts(segment_sentences("He met (Dr. Smith) today. Fine.")) ==
        std::vector<std::string>{"He met (Dr. Smith) today.", "Fine."});
}

TEST_CASE("no split without whitespace or without an opener") {
  CHECK(texts(segment_sentences("pi is 3.14 exactly. Next.")) ==
        std::vector<std::string>{"pi is 3.14 exactly.", "Next."});
  // lowercase continuation does not open a sentence
  CHECK(texts(segment_sentences("He said no. but kept going. Then left.")) ==
        std::vector<std::string>{"He said no. but kept going.", "Then left."});
}

TEST_CASE("opening quotes count as sentence openers") {
  CHECK(texts(segment_sentences("She agreed. \"Sure thing.\"")).size() == 2);
  CHECK(texts(segment_sentences("She agreed. “Sure thing.”")).size() == 2);
}

TEST_CASE("terminator runs stay attached and a trailing fragment is kept") {
  CHECK(texts(segment_sentences("What?! Really... Yes")) ==
        std::vector<std::string>{"What?!", "Really...", "Yes"});
}

TEST_CASE("indices are contiguous from zero") {
  const auto ss = segment_sentences("One. Two. Three.");
  REQUIRE(ss.size() == 3);
  for (std::size_t i = 0; i < ss.size(); ++i) CHECK(ss[i].index == i);
}

TEST_CASE("segmentation preserves non-whitespace characters in order") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcDEF.?! \n'\"(x1 ";
  for (int iter = 0; iter < 200; ++iter) {
    std::string text;
    const std::size_t len = rng() % 120;
    for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    const auto ss = segment_sentences(text);
    std::string joined;
    for (const auto& s : ss) {
      if (!joined.empty()) joined.push_back(' ');
      joined += s.text;
    }
    CHECK(non_ws(joined) == non_ws(text));
  }
}

TEST_CASE("document_text joins with single spaces") {
  CHECK(document_text({{"A.", 0}, {"B.", 1}}) == "A. B.");
  CHECK(document_text({}).empty());
}
