#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "contracheck/tfidf.hpp"
#include "oracle.hpp"

using namespace contracheck;

namespace {

std::vector<Sentence> as_sentences(const std::vector<std::string>& texts) {
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({texts[i], i});
  return out;
}

// Small random corpora for property checks.
std::vector<std::string> random_corpus(std::mt19937_64& rng, std::size_t max_sentences) {
  static const std::vector<std::string> kWords = {
      "alpha", "beta",  "gamma", "delta", "omega", "stone", "river", "cloud",
      "north", "south", "tower", "green", "seven", "three", "moon",  "sun"};
  const std::size_t n = 1 + rng() % max_sentences;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t words = 2 + rng() % 5;
    std::string s;
    for (std::size_t w = 0; w < words; ++w) {
      if (!s.empty()) s.push_back(' ');
      s += kWords[rng() % kWords.size()];
    }
    s.push_back('.');
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("tokenizer lowercases and splits on non-alphanumeric runs") {
  CHECK(tokenize("The cat, sat!") == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize("a1-b2  c3") == std::vector<std::string>{"a1", "b2", "c3"});
  CHECK(tokenize("...").empty());
}

TEST_CASE("idf follows the smoothed formula") {
  const auto v = TfidfVectorizer::fit({"a b", "a c"});
  CHECK(v.idf("a") == Catch::Approx(1.0).margin(1e-15));
  CHECK(v.idf("b") == Catch::Approx(1.4054651081081644).margin(1e-12));
  CHECK(v.idf("zzz") == 0.0);
  CHECK_THROWS_AS(TfidfVectorizer::fit({}), std::invalid_argument);
}

TEST_CASE("cosine of a sentence with itself is 1") {
  const auto v = TfidfVectorizer::fit({"a b", "a c"});
  const auto x = v.transform("a b");
  CHECK(cosine_similarity(x, x) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("cosine of disjoint token sets is 0 and empty vectors yield 0") {
  const auto v = TfidfVectorizer::fit({"a b", "c d"});
  CHECK(cosine_similarity(v.transform("a b"), v.transform("c d")) == 0.0);
  CHECK(cosine_similarity(v.transform(""), v.transform("a b")) == 0.0);
}

TEST_CASE("cosine against the brute-force value on the fixture corpus") {
  const std::vector<std::string> corpus = {"the cat sat", "the cat ran", "a dog barked",
                                           "the mat was flat"};
  const auto v = TfidfVectorizer::fit(corpus);
  const double got = cosine_similarity(v.transform("the cat sat"), v.transform("the cat ran"));
  CHECK(got == Catch::Approx(0.5071471123290018).margin(1e-12));
  // and the independent dense implementation agrees
  const auto dense = oracle::DenseTfidf::fit(corpus);
  CHECK(oracle::cosine(dense.transform("the cat sat"), dense.transform("the cat ran")) ==
        Catch::Approx(got).margin(1e-15));
}

TEST_CASE("has_match basics") {
  const MatchConfig cfg;
  CHECK(has_match("The sky is blue.", {"The sky is blue.", "Grass is green."}, cfg));
  CHECK_FALSE(has_match("anything", {}, cfg));
  CHECK_FALSE(has_match("purple elephants", {"quantum chromodynamics"}, cfg));
}

TEST_CASE("has_match accepts a one-stopword difference at the default threshold") {
  // cosine computed independently: 0.9525793444156804
  const std::string s = "the quick fox jumped over the fence";
  const std::vector<std::string> cands = {"quick fox jumped over the fence"};
  CHECK(has_match(s, cands, MatchConfig{}));
  CHECK(oracle::has_match(s, cands, 0.8));
}

TEST_CASE("a similarity exactly at the threshold is a match") {
  const std::vector<std::string> corpus = {"the cat sat", "the cat ran", "a dog barked",
                                           "the mat was flat"};
  // {s} union candidates fit scope reproduced by hand
  MatchConfig cfg;
  const auto v = TfidfVectorizer::fit(
      detail::unique_corpus({&corpus}, "the cat sat"));
  const double sim = cosine_similarity(v.transform("the cat sat"), v.transform("the cat ran"));
  cfg.cosine_threshold = sim;
  CHECK(has_match("the cat sat", corpus, cfg));
}

TEST_CASE("match config validation") {
  MatchConfig cfg;
  cfg.cosine_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.cosine_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("redact removes exact matches and keeps order") {
  const auto doc = as_sentences({"One thing.", "Two things.", "Three things."});
  const auto r = redact(doc, {"Two things."}, MatchConfig{});
  REQUIRE(r.sentences.size() == 2);
  CHECK(r.sentences[0].text == "One thing.");
  CHECK(r.sentences[1].text == "Three things.");
  CHECK(r.sentences[0].index == 0);
  CHECK(r.sentences[1].index == 1);
  CHECK(r.original_indices == std::vector<std::size_t>{0, 2});
}

TEST_CASE("redact with empty evidence is the identity") {
  const auto doc = as_sentences({"A.", "B."});
  const auto r = redact(doc, {}, MatchConfig{});
  REQUIRE(r.sentences.size() == 2);
  CHECK(r.sentences[0].text == "A.");
  CHECK(r.original_indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("redact removes near-duplicates above the threshold") {
  // cosine of sentence 2 against the evidence under the doc+evidence fit
  // scope is 0.8444932017012523 (brute-force value), above 0.8.
  const auto doc = as_sentences(
      {"Alice went to the market.", "Bob bought three apples.", "Carol stayed home."});
  const std::vector<std::string> evidence = {"Bob bought three apples yesterday."};
  const auto r = redact(doc, evidence, MatchConfig{});
  REQUIRE(r.sentences.size() == 2);
  CHECK(r.sentences[0].text == "Alice went to the market.");
  CHECK(r.sentences[1].text == "Carol stayed home.");
}

TEST_CASE("redact removes every copy of a duplicated sentence") {
  const auto doc = as_sentences({"Same words here.", "Other ones.", "Same words here."});
  const auto r = redact(doc, {"Same words here."}, MatchConfig{});
  REQUIRE(r.sentences.size() == 1);
  CHECK(r.sentences[0].text == "Other ones.");
}

TEST_CASE("redact properties against the brute-force oracle") {
  std::mt19937_64 rng(20240817);
  const MatchConfig cfg;
  for (int iter = 0; iter < 60; ++iter) {
    const auto corpus = random_corpus(rng, 20);
    const auto doc = as_sentences(corpus);
    std::vector<std::string> evidence;
    const std::size_t k = rng() % 4;
    for (std::size_t i = 0; i < k && !corpus.empty(); ++i)
      evidence.push_back(corpus[rng() % corpus.size()]);

    const auto r = redact(doc, evidence, cfg);

    // matches the naive implementation
    const auto naive = oracle::redact(corpus, evidence, cfg.cosine_threshold);
    REQUIRE(r.sentences.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i) CHECK(r.sentences[i].text == naive[i]);

    // survivors keep their relative order
    for (std::size_t i = 1; i < r.original_indices.size(); ++i)
      CHECK(r.original_indices[i - 1] < r.original_indices[i]);

    // size identity: survivors + removed == total
    CHECK(r.sentences.size() + (doc.size() - r.sentences.size()) == doc.size());

    // idempotence
    const auto again = redact(r.sentences, evidence, cfg);
    REQUIRE(again.sentences.size() == r.sentences.size());
    for (std::size_t i = 0; i < again.sentences.size(); ++i)
      CHECK(again.sentences[i].text == r.sentences[i].text);
  }
}

TEST_CASE("has_match and pairwise cosines agree with the brute-force oracle") {
  std::mt19937_64 rng(31337);
  const MatchConfig cfg;
  for (int iter = 0; iter < 40; ++iter) {
    const auto corpus = random_corpus(rng, 20);
    const std::string probe = corpus[rng() % corpus.size()] + " extra";
    std::vector<std::string> candidates(corpus.begin(),
                                        corpus.begin() + 1 + rng() % corpus.size());
    CHECK(has_match(probe, candidates, cfg) ==
          oracle::has_match(probe, candidates, cfg.cosine_threshold));

    // pairwise cosines under a shared fit are bit-identical to the dense path
    const auto lib = TfidfVectorizer::fit(corpus);
    const auto dense = oracle::DenseTfidf::fit(corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const double a =
          cosine_similarity(lib.transform(probe), lib.transform(corpus[i]));
      const double b = oracle::cosine(dense.transform(probe), dense.transform(corpus[i]));
      CHECK(a == b);
    }
  }
}

TEST_CASE("cosine is symmetric and bounded on random corpora") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    const auto corpus = random_corpus(rng, 12);
    const auto v = TfidfVectorizer::fit(corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      for (std::size_t j = 0; j < corpus.size(); ++j) {
        const double ab = cosine_similarity(v.transform(corpus[i]), v.transform(corpus[j]));
        const double ba = cosine_similarity(v.transform(corpus[j]), v.transform(corpus[i]));
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
      }
    }
  }
}

TEST_CASE("with a fixed vectorizer, more candidates never turn a match off") {
  std::mt19937_64 rng(4242);
  for (int iter = 0; iter < 40; ++iter) {
    auto corpus = random_corpus(rng, 12);
    const auto v = TfidfVectorizer::fit(corpus);
    const std::string& probe = corpus[rng() % corpus.size()];
    const auto vp = v.transform(probe);
    const double thr = 0.8;
    bool matched_small = false;
    bool matched_large = false;
    const std::size_t half = corpus.size() / 2;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const bool hit = cosine_similarity(vp, v.transform(corpus[i])) >= thr;
      if (i < half) matched_small = matched_small || hit;
      matched_large = matched_large || hit;
    }
    if (matched_small) CHECK(matched_large);
  }
}
