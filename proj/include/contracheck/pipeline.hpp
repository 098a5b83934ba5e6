#pragma once

#include <algorithm>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "contracheck/client.hpp"
#include "contracheck/tfidf.hpp"

namespace contracheck {

enum class Approach { DP, RnR, RnRUF, RnRCF };

inline const char* to_string(Approach a) {
  switch (a) {
    case Approach::DP: return "dp";
    case Approach::RnR: return "rnr";
    case Approach::RnRUF: return "rnr-uf";
    case Approach::RnRCF: return "rnr-cf";
  }
  return "?";
}

inline std::optional<Approach> approach_from_string(std::string_view s) {
  if (s == "dp") return Approach::DP;
  if (s == "rnr") return Approach::RnR;
  if (s == "rnr-uf") return Approach::RnRUF;
  if (s == "rnr-cf") return Approach::RnRCF;
  return std::nullopt;
}

struct RoundRecord {
  int round_index = 1;  // 1-based
  std::size_t input_sentence_count = 0;
  Verdict verdict;
  bool no_removal = false;  // this round's evidence redacted nothing
};

struct FilterStage {
  std::vector<std::string> input;
  std::vector<std::string> output;
  bool constrained = false;
  bool fell_back_to_input = false;
};

/// Full per-document chain: every detect round, the optional filter stage,
/// and the final judgement/evidence pair.
struct PredictionTrace {
  std::string doc_id;
  Approach approach = Approach::DP;
  std::vector<RoundRecord> rounds;
  std::optional<FilterStage> filter_stage;
  Judgement final_judgement = Judgement::No;
  std::vector<std::string> final_evidence;  // unique, first-seen order
  int llm_call_count = 0;                   // detect rounds + 1 if filtered
  bool truncated = false;                   // hit the round cap
  bool failed = false;
  std::string error;
  std::string backend_digest;
};

/// One evaluation run. max_rounds caps the retry loop, which is otherwise
/// unbounded when a model keeps answering Yes with evidence that matches
/// nothing.
struct RunConfig {
  Approach approach = Approach::DP;
  MatchConfig match;
  int max_rounds = 10;
  int parallelism = 1;

  void validate() const {
    match.validate();
    if (max_rounds < 1) throw std::invalid_argument("RunConfig: max_rounds must be >= 1");
    if (parallelism < 1) throw std::invalid_argument("RunConfig: parallelism must be >= 1");
  }
};

/// Appends items not yet present (exact string equality); keeps first-seen order.
inline void append_unique(std::vector<std::string>& acc, const std::vector<std::string>& items) {
  for (const auto& s : items) {
    if (std::find(acc.begin(), acc.end(), s) == acc.end()) acc.push_back(s);
  }
}

/// Direct prompting: exactly one detect round.
inline PredictionTrace run_dp(const Document& doc, LlmBackend& backend, const RunConfig& cfg) {
  cfg.validate();
  PredictionTrace trace;
  trace.doc_id = doc.id;
  trace.approach = Approach::DP;
  trace.backend_digest = backend.config_digest();
  Verdict v = detect(backend, document_text(doc.sentences));
  trace.final_judgement = v.judgement;
  trace.final_evidence = {};
  append_unique(trace.final_evidence, v.evidence);
  trace.rounds.push_back(RoundRecord{1, doc.sentences.size(), std::move(v), false});
  trace.llm_call_count = 1;
  return trace;
}

/// Redact-and-retry. Round 1 detects on the full document; while the latest
/// judgement is Yes, the latest evidence is redacted out and the shrunk
/// document is re-queried. Stops on a No, an empty redacted document, the
/// round cap (trace flagged truncated), or two consecutive zero-removal
/// redactions (identical prompts would loop forever against a cache). The
/// final judgement is round 1's; the final evidence is the union across
/// rounds.
inline PredictionTrace run_rnr(const Document& doc, LlmBackend& backend, const RunConfig& cfg) {
  cfg.validate();
  PredictionTrace trace;
  trace.doc_id = doc.id;
  trace.approach = Approach::RnR;
  trace.backend_digest = backend.config_digest();

  std::vector<Sentence> working = doc.sentences;
  int round = 1;
  Verdict v = detect(backend, document_text(working));
  trace.final_judgement = v.judgement;
  append_unique(trace.final_evidence, v.evidence);
  trace.rounds.push_back(RoundRecord{round, working.size(), std::move(v), false});

  int zero_removal_streak = 0;
  while (trace.rounds.back().verdict.judgement == Judgement::Yes) {
    if (round >= cfg.max_rounds) {
      trace.truncated = true;
      break;
    }
    RedactResult red = redact(working, trace.rounds.back().verdict.evidence, cfg.match);
    const bool removed_nothing = red.sentences.size() == working.size();
    if (removed_nothing) {
      trace.rounds.back().no_removal = true;
      if (++zero_removal_streak >= 2) break;
    } else {
      zero_removal_streak = 0;
    }
    if (red.sentences.empty()) break;
    working = std::move(red.sentences);
    ++round;
    Verdict next = detect(backend, document_text(working));
    append_unique(trace.final_evidence, next.evidence);
    trace.rounds.push_back(RoundRecord{round, working.size(), std::move(next), false});
  }

  trace.llm_call_count = static_cast<int>(trace.rounds.size());
  return trace;
}

/// Redact-and-retry followed by one filter call over the accumulated evidence
/// (skipped when that set is empty). The filter only selects from its input:
/// returned sentences not present in the input are dropped. Constrained mode
/// never changes the classification and never yields an empty set (falling
/// back to the full input if needed); unconstrained mode flips Yes to No when
/// the filter output is empty.
inline PredictionTrace run_rnr_filtered(const Document& doc, LlmBackend& backend,
                                        const RunConfig& cfg, bool constrained) {
  PredictionTrace trace = run_rnr(doc, backend, cfg);
  trace.approach = constrained ? Approach::RnRCF : Approach::RnRUF;
  if (trace.final_evidence.empty()) return trace;

  const std::vector<std::string> input = trace.final_evidence;
  FilterResult fr = filter_evidence(backend, input, constrained);

  std::vector<std::string> kept;
  const std::set<std::string> input_set(input.begin(), input.end());
  for (const auto& s : fr.evidence) {
    if (input_set.count(s) && std::find(kept.begin(), kept.end(), s) == kept.end())
      kept.push_back(s);
  }

  FilterStage stage;
  stage.input = input;
  stage.constrained = constrained;
  if (constrained && kept.empty()) {
    stage.output = input;
    stage.fell_back_to_input = true;
    trace.final_evidence = input;
  } else if (!constrained && kept.empty()) {
    stage.output = {};
    trace.final_judgement = Judgement::No;
    trace.final_evidence.clear();
  } else {
    stage.output = kept;
    trace.final_evidence = kept;
  }
  stage.fell_back_to_input = stage.fell_back_to_input || fr.fell_back_to_input;
  trace.filter_stage = std::move(stage);
  trace.llm_call_count += 1;
  return trace;
}

inline PredictionTrace run_one(const Document& doc, LlmBackend& backend, const RunConfig& cfg) {
  switch (cfg.approach) {
    case Approach::DP: return run_dp(doc, backend, cfg);
    case Approach::RnR: return run_rnr(doc, backend, cfg);
    case Approach::RnRUF: return run_rnr_filtered(doc, backend, cfg, false);
    case Approach::RnRCF: return run_rnr_filtered(doc, backend, cfg, true);
  }
  throw std::logic_error("unknown approach");
}

/// Runs every document, up to cfg.parallelism at a time. Backend errors are
/// recorded on the affected trace instead of aborting the batch. `sink` (when
/// given) receives traces in input order as soon as each contiguous prefix
/// completes, regardless of scheduling.
inline std::vector<PredictionTrace> run_dataset(
    const std::vector<Document>& docs, LlmBackend& backend, const RunConfig& cfg,
    const std::function<void(const PredictionTrace&)>& sink = {}) {
  cfg.validate();
  const std::size_t n = docs.size();
  std::vector<PredictionTrace> results(n);
  std::vector<char> done(n, 0);

  std::mutex mu;
  std::size_t flushed = 0;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      PredictionTrace trace;
      try {
        trace = run_one(docs[i], backend, cfg);
      } catch (const BackendError& e) {
        trace = PredictionTrace{};
        trace.doc_id = docs[i].id;
        trace.approach = cfg.approach;
        trace.backend_digest = backend.config_digest();
        trace.failed = true;
        trace.error = e.what();
      }
      std::lock_guard lock(mu);
      results[i] = std::move(trace);
      done[i] = 1;
      while (flushed < n && done[flushed]) {
        if (sink) sink(results[flushed]);
        ++flushed;
      }
    }
  };

  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace contracheck
