#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "contracheck/backend.hpp"
#include "contracheck/verdict.hpp"

namespace contracheck {

/// One detect call with parse retries. On parse failure the prompt is
/// re-invoked (bypassing cache reads) up to max_parse_retries times, then the
/// conservative fallback Verdict(No, [], Failed) is returned. Backend errors
/// propagate.
inline Verdict detect(LlmBackend& backend, const std::string& doc_text) {
  const std::string prompt = render_prompt(PromptKind::Detect, std::string_view(doc_text));
  const int retries = std::max(0, backend.config().max_parse_retries);
  std::string raw;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    raw = backend.invoke(prompt, attempt > 0);
    try {
      return parse_verdict(raw, PromptKind::Detect);
    } catch (const VerdictParseError&) {
    }
  }
  Verdict fallback;
  fallback.judgement = Judgement::No;
  fallback.raw_response = raw;
  fallback.parse_status = ParseStatus::Failed;
  return fallback;
}

struct FilterResult {
  std::vector<std::string> evidence;
  ParseStatus parse_status = ParseStatus::Clean;
  bool fell_back_to_input = false;
  std::string raw_response;
};

/// One filter call over a flagged sentence list. Constrained filters must
/// return at least one sentence: an empty (or unparseable) response is
/// re-invoked, then falls back to the full input list. Unconstrained filters
/// may legitimately return an empty list; only an unparseable response falls
/// back to the input (a no-op filter).
inline FilterResult filter_evidence(LlmBackend& backend, const std::vector<std::string>& sentences,
                                    bool constrained) {
  const PromptKind kind =
      constrained ? PromptKind::FilterConstrained : PromptKind::FilterUnconstrained;
  const std::string prompt = render_prompt(kind, sentences);
  const int retries = std::max(0, backend.config().max_parse_retries);
  std::string raw;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    raw = backend.invoke(prompt, attempt > 0);
    try {
      Verdict v = parse_verdict(raw, kind);
      if (constrained && v.evidence.empty()) continue;  // violates the >= 1 sentence contract
      return FilterResult{std::move(v.evidence), v.parse_status, false, raw};
    } catch (const VerdictParseError&) {
    }
  }
  return FilterResult{sentences, ParseStatus::Failed, true, raw};
}

}  // namespace contracheck
