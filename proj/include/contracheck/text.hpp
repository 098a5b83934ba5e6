#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace contracheck {

enum class Judgement { Yes, No };

inline const char* to_string(Judgement j) { return j == Judgement::Yes ? "yes" : "no"; }

inline std::optional<Judgement> judgement_from_string(std::string_view s) {
  if (s == "yes") return Judgement::Yes;
  if (s == "no") return Judgement::No;
  return std::nullopt;
}

/// One sentence of a document. `index` is the 0-based position within the
/// document the sentence currently belongs to.
struct Sentence {
  std::string text;
  std::size_t index = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// A document with its gold annotation. Positive documents (label Yes) carry
/// a non-empty evidence set whose entries exactly equal sentence texts.
struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  Judgement label = Judgement::No;
  std::vector<std::string> gold_evidence;  // unique, each equals some sentence text
  std::optional<std::string> contradiction_type;

  std::size_t sentence_count() const { return sentences.size(); }

  friend bool operator==(const Document&, const Document&) = default;
};

inline bool ascii_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && ascii_space(s[b])) ++b;
  while (e > b && ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

/// Joins sentence texts with single spaces; the prompt-facing form of a
/// (possibly redacted) document.
inline std::string document_text(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

namespace detail {

inline bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

// Abbreviations whose trailing '.' never ends a sentence.
inline const std::vector<std::string>& abbreviations() {
  static const std::vector<std::string> kList = {
      "Dr.", "Mr.", "Mrs.", "Ms.", "vs.", "etc.", "e.g.", "i.e.", "St.", "No."};
  return kList;
}

inline bool opens_sentence(std::string_view text, std::size_t k) {
  const char c = text[k];
  if (c >= 'A' && c <= 'Z') return true;
  if (c == '"' || c == '\'' || c == '(' || c == '[') return true;
  // UTF-8 curly opening quotes: U+201C, U+2018
  if (text.size() - k >= 3 && static_cast<unsigned char>(c) == 0xE2 &&
      static_cast<unsigned char>(text[k + 1]) == 0x80) {
    const auto b = static_cast<unsigned char>(text[k + 2]);
    if (b == 0x9C || b == 0x98) return true;
  }
  return false;
}

// True when the word ending at text[dot] (inclusive) is a known abbreviation,
// ignoring leading punctuation such as '(' or quotes.
inline bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t end = dot + 1;
  std::size_t begin = end;
  while (begin > 0 && !ascii_space(text[begin - 1])) --begin;
  while (begin < end && !std::isalnum(static_cast<unsigned char>(text[begin]))) ++begin;
  const std::string_view token = text.substr(begin, end - begin);
  for (const auto& a : abbreviations()) {
    if (token == a) return true;
  }
  return false;
}

}  // namespace detail

/// Rule-based sentence segmentation: split after a run of [.?!] followed by
/// whitespace and an uppercase letter or opening quote, with an abbreviation
/// exception list. Whitespace-only input yields an empty list. Concatenating
/// the output with single spaces preserves every non-whitespace character of
/// the input in order.
inline std::vector<Sentence> segment_sentences(std::string_view text) {
  std::vector<Sentence> out;
  auto flush = [&](std::size_t from, std::size_t to) {
    std::string s = trim_copy(text.substr(from, to - from));
    if (!s.empty()) out.push_back(Sentence{std::move(s), out.size()});
  };

  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!detail::is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && detail::is_terminator(text[j + 1])) ++j;
    std::size_t k = j + 1;
    bool saw_space = false;
    while (k < n && ascii_space(text[k])) {
      saw_space = true;
      ++k;
    }
    bool boundary = false;
    if (k >= n) {
      boundary = true;
    } else if (saw_space && detail::opens_sentence(text, k)) {
      boundary = true;
      if (text[j] == '.' && j == i && detail::ends_with_abbreviation(text, j)) boundary = false;
    }
    if (boundary) {
      flush(start, j + 1);
      start = k;
      i = k;
    } else {
      i = j + 1;
    }
  }
  if (start < n) flush(start, n);
  return out;
}

}  // namespace contracheck
