#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contracheck/errors.hpp"
#include "contracheck/prompts.hpp"
#include "contracheck/text.hpp"

namespace contracheck {

enum class ParseStatus { Clean, Repaired, Failed };

inline const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Clean: return "clean";
    case ParseStatus::Repaired: return "repaired";
    case ParseStatus::Failed: return "failed";
  }
  return "?";
}

inline std::optional<ParseStatus> parse_status_from_string(std::string_view s) {
  if (s == "clean") return ParseStatus::Clean;
  if (s == "repaired") return ParseStatus::Repaired;
  if (s == "failed") return ParseStatus::Failed;
  return std::nullopt;
}

/// One model call's parsed output. For detect responses a No judgement always
/// carries an empty evidence list.
struct Verdict {
  Judgement judgement = Judgement::No;
  std::vector<std::string> evidence;
  std::string raw_response;
  ParseStatus parse_status = ParseStatus::Clean;
};

namespace detail {

// Span [begin, end) of the first balanced JSON object starting at or after
// `from`, tracking string literals and escapes.
inline std::optional<std::pair<std::size_t, std::size_t>> find_json_object(std::string_view s,
                                                                           std::size_t from) {
  std::size_t start = s.find('{', from);
  while (start != std::string_view::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < s.size(); ++i) {
      const char c = s[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return std::make_pair(start, i + 1);
      }
    }
    start = s.find('{', start + 1);
  }
  return std::nullopt;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

/// Extracts the first JSON object in `raw` that satisfies the schema for
/// `kind` (detect needs judgement + evidence, filters need evidence only) and
/// normalizes it. Surrounding prose, markdown fences, whitespace-padded or
/// empty evidence entries, and a No judgement with evidence are tolerated and
/// flagged as Repaired. Throws VerdictParseError when nothing usable exists.
inline Verdict parse_verdict(const std::string& raw, PromptKind kind) {
  const std::string trimmed = trim_copy(raw);
  const bool needs_judgement = kind == PromptKind::Detect;

  std::size_t from = 0;
  while (true) {
    const auto span = detail::find_json_object(trimmed, from);
    if (!span) throw VerdictParseError("no JSON object with the required keys found");
    from = span->first + 1;

    const auto j = nlohmann::json::parse(
        trimmed.substr(span->first, span->second - span->first), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (!j.contains("evidence") || !j.at("evidence").is_array()) continue;

    Judgement judgement = Judgement::Yes;  // filters: carried over by the caller
    if (needs_judgement) {
      if (!j.contains("judgement") || !j.at("judgement").is_string()) continue;
      const auto parsed =
          judgement_from_string(detail::ascii_lower(j.at("judgement").get<std::string>()));
      if (!parsed) continue;
      judgement = *parsed;
    }

    std::vector<std::string> evidence;
    bool entries_ok = true;
    bool normalized = false;
    for (const auto& e : j.at("evidence")) {
      if (!e.is_string()) {
        entries_ok = false;
        break;
      }
      const auto original = e.get<std::string>();
      std::string t = trim_copy(original);
      if (t != original) normalized = true;
      if (t.empty()) {
        normalized = true;
        continue;
      }
      evidence.push_back(std::move(t));
    }
    if (!entries_ok) continue;

    if (needs_judgement && judgement == Judgement::No && !evidence.empty()) {
      evidence.clear();
      normalized = true;
    }

    const bool whole = span->first == 0 && span->second == trimmed.size();
    Verdict v;
    v.judgement = judgement;
    v.evidence = std::move(evidence);
    v.raw_response = raw;
    v.parse_status = (whole && !normalized) ? ParseStatus::Clean : ParseStatus::Repaired;
    return v;
  }
}

}  // namespace contracheck
