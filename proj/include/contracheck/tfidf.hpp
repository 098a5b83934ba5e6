#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contracheck/text.hpp"

namespace contracheck {

enum class Tokenizer { LowercaseAlnum };
enum class IdfScheme { Smoothed };
enum class VectorNorm { L2 };

/// Parameters governing every approximate sentence comparison. The scheme is
/// fixed (lowercase alphanumeric tokens, smoothed idf, L2 norm); only the
/// cosine threshold varies. A similarity of at least `cosine_threshold`
/// counts as a match.
struct MatchConfig {
  double cosine_threshold = 0.8;
  Tokenizer tokenizer = Tokenizer::LowercaseAlnum;
  IdfScheme idf_scheme = IdfScheme::Smoothed;
  VectorNorm norm = VectorNorm::L2;

  void validate() const {
    if (!(cosine_threshold > 0.0) || cosine_threshold > 1.0)
      throw std::invalid_argument("MatchConfig: cosine_threshold must be in (0, 1]");
  }
};

/// Sparse term->weight map. L2 norm is 1 for any non-empty vector; an empty
/// token set yields the empty (zero) vector.
using TfidfVector = std::map<std::string, double>;

/// Lowercases ASCII letters and splits on runs of non-alphanumeric bytes.
/// Bytes >= 0x80 are kept verbatim so multi-byte UTF-8 words stay intact.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) {
      cur.push_back(ch);
    } else if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

/// Immutable fitted vectorizer state. tf = raw count,
/// idf(t) = ln((1+N)/(1+df(t))) + 1 over the fit corpus, vectors L2-normalized.
/// Terms unseen at fit time are dropped at transform time.
class TfidfVectorizer {
 public:
  static TfidfVectorizer fit(const std::vector<std::string>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("TfidfVectorizer: empty corpus");
    TfidfVectorizer v;
    v.corpus_size_ = corpus.size();
    std::map<std::string, std::size_t> df;
    for (const auto& sentence : corpus) {
      const auto toks = tokenize(sentence);
      const std::set<std::string> uniq(toks.begin(), toks.end());
      for (const auto& t : uniq) ++df[t];
    }
    const double n = static_cast<double>(v.corpus_size_);
    for (const auto& [term, d] : df) {
      v.idf_[term] = std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0;
    }
    return v;
  }

  TfidfVector transform(std::string_view sentence) const {
    std::map<std::string, std::size_t> counts;
    for (auto& t : tokenize(sentence)) ++counts[t];
    TfidfVector vec;
    double sq = 0.0;
    for (const auto& [term, count] : counts) {
      const auto it = idf_.find(term);
      if (it == idf_.end()) continue;
      const double w = static_cast<double>(count) * it->second;
      vec[term] = w;
      sq += w * w;
    }
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (auto& [term, w] : vec) w /= norm;
    }
    return vec;
  }

  double idf(const std::string& term) const {
    const auto it = idf_.find(term);
    return it == idf_.end() ? 0.0 : it->second;
  }

  std::size_t corpus_size() const { return corpus_size_; }

 private:
  std::map<std::string, double> idf_;
  std::size_t corpus_size_ = 0;
};

/// Dot product of two L2-normalized sparse vectors, clamped to [0, 1].
/// The zero vector against anything is 0.
inline double cosine_similarity(const TfidfVector& a, const TfidfVector& b) {
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot, 0.0, 1.0);
}

namespace detail {

// Deduplicated fit corpus: the comparison scope is a set of sentence texts.
inline std::vector<std::string> unique_corpus(std::initializer_list<const std::vector<std::string>*> parts,
                                              std::string_view extra = {}) {
  std::set<std::string> uniq;
  for (const auto* p : parts) uniq.insert(p->begin(), p->end());
  if (!extra.empty()) uniq.insert(std::string(extra));
  return {uniq.begin(), uniq.end()};
}

}  // namespace detail

/// True iff some candidate reaches the cosine threshold against `s`, with the
/// vectorizer fitted on the set {s} union candidates for this comparison.
/// Empty candidate set yields false.
inline bool has_match(std::string_view s, const std::vector<std::string>& candidates,
                      const MatchConfig& config) {
  config.validate();
  if (candidates.empty()) return false;
  const auto corpus = detail::unique_corpus({&candidates}, s);
  const auto vectorizer = TfidfVectorizer::fit(corpus);
  const TfidfVector vs = vectorizer.transform(s);
  const std::set<std::string> uniq(candidates.begin(), candidates.end());
  for (const auto& c : uniq) {
    if (cosine_similarity(vs, vectorizer.transform(c)) >= config.cosine_threshold) return true;
  }
  return false;
}

/// Survivors of a redaction, reindexed from 0; `original_indices[i]` is the
/// position the i-th survivor held in the input list (strictly increasing).
struct RedactResult {
  std::vector<Sentence> sentences;
  std::vector<std::size_t> original_indices;
};

/// Removes every sentence matching some evidence entry at the cosine
/// threshold. The vectorizer is fitted once on the set of document sentence
/// texts union evidence texts. Duplicate sentences are redacted by content.
inline RedactResult redact(const std::vector<Sentence>& doc_sentences,
                           const std::vector<std::string>& evidence, const MatchConfig& config) {
  config.validate();
  RedactResult out;
  if (evidence.empty()) {
    out.sentences.reserve(doc_sentences.size());
    for (std::size_t i = 0; i < doc_sentences.size(); ++i) {
      out.sentences.push_back(Sentence{doc_sentences[i].text, i});
      out.original_indices.push_back(i);
    }
    return out;
  }

  std::vector<std::string> doc_texts;
  doc_texts.reserve(doc_sentences.size());
  for (const auto& s : doc_sentences) doc_texts.push_back(s.text);
  const auto corpus = detail::unique_corpus({&doc_texts, &evidence});
  const auto vectorizer = TfidfVectorizer::fit(corpus);

  const std::set<std::string> ev_uniq(evidence.begin(), evidence.end());
  std::vector<TfidfVector> ev_vecs;
  ev_vecs.reserve(ev_uniq.size());
  for (const auto& e : ev_uniq) ev_vecs.push_back(vectorizer.transform(e));

  std::map<std::string, bool> matched_by_text;  // duplicates share the decision
  for (std::size_t i = 0; i < doc_sentences.size(); ++i) {
    const std::string& text = doc_sentences[i].text;
    auto it = matched_by_text.find(text);
    if (it == matched_by_text.end()) {
      const TfidfVector vs = vectorizer.transform(text);
      bool matched = false;
      for (const auto& ev : ev_vecs) {
        if (cosine_similarity(vs, ev) >= config.cosine_threshold) {
          matched = true;
          break;
        }
      }
      it = matched_by_text.emplace(text, matched).first;
    }
    if (!it->second) {
      out.sentences.push_back(Sentence{text, out.sentences.size()});
      out.original_indices.push_back(i);
    }
  }
  return out;
}

}  // namespace contracheck
