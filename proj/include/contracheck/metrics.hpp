#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "contracheck/errors.hpp"
#include "contracheck/pipeline.hpp"
#include "contracheck/tfidf.hpp"

namespace contracheck {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Outcome { TP, FP, TN, FN };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::TP: return "tp";
    case Outcome::FP: return "fp";
    case Outcome::TN: return "tn";
    case Outcome::FN: return "fn";
  }
  return "?";
}

/// Per-document evidence scores. For negative documents (empty gold set) the
/// recall-style fields are not defined and hold NaN; aggregation only reads
/// them for positives.
struct PerDocScore {
  std::string doc_id;
  double eh = 0.0;   // 1 iff every gold sentence has a match in the prediction
  double ep = 0.0;   // matched gold (clamped by |prediction|) / |prediction|; 0 on empty prediction
  double er = 0.0;   // matched gold (clamped) / |gold|; NaN for negatives
  double ecr = 0.0;  // |prediction| / sentence count, clamped to 1
  std::size_t predicted_evidence_size = 0;
  std::size_t gold_evidence_size = 0;
  int retries = 0;  // llm_call_count
  Outcome classified = Outcome::TN;
};

struct EvaluationReport {
  // counts
  std::size_t n = 0;
  std::size_t positives = 0;       // |D+|
  std::size_t true_positives = 0;  // |D++| == TP
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  // classification
  double accuracy = kNaN, precision = kNaN, recall_tpr = kNaN, f1 = kNaN;
  double fpr = kNaN, tnr = kNaN, fnr = kNaN;
  // evidence extraction
  double ehr = kNaN, ehrc = kNaN;
  double epr = kNaN, eprc = kNaN;
  double err = kNaN, errc = kNaN;
  double aecr = kNaN;
  // averages of |prediction| and llm calls
  double avg_sentences_pos = kNaN, avg_sentences_neg = kNaN, avg_sentences_all = kNaN;
  double avg_retries_pos = kNaN, avg_retries_neg = kNaN, avg_retries_all = kNaN;
  // |EHR - TPR*EHRC| and friends
  double residual_ehr = 0.0, residual_epr = 0.0, residual_err = 0.0;
  // provenance (optional)
  std::string approach;
  std::string model;
};

/// Error analysis of a filter stage relative to the unfiltered run. Rates
/// with a zero denominator are NaN; the raw counts expose the denominators.
struct FilterErrorReport {
  double rate_wrong_to_correct_given_flip = kNaN;
  double rate_correct_to_wrong_given_flip = kNaN;
  double rate_evidence_kept_given_found = kNaN;
  double rate_evidence_discarded_given_found = kNaN;
  std::size_t flip_count = 0;
  std::size_t wrong_to_correct = 0;
  std::size_t correct_to_wrong = 0;
  std::size_t found_count = 0;
  std::size_t kept_count = 0;
};

inline bool is_positive(Outcome o) { return o == Outcome::TP || o == Outcome::FN; }

/// Scores one document against its trace. Gold sentences are matched into the
/// predicted evidence with the approximate matcher; the overlap is counted
/// from the gold side and clamped by the prediction size so precision never
/// exceeds 1 under many-to-one fuzzy matches.
inline PerDocScore score_doc(const Document& doc, const PredictionTrace& trace,
                             const MatchConfig& match) {
  if (doc.id != trace.doc_id)
    throw AlignmentError("score_doc: document " + doc.id + " vs trace " + trace.doc_id);
  PerDocScore s;
  s.doc_id = doc.id;
  s.predicted_evidence_size = trace.final_evidence.size();
  s.gold_evidence_size = doc.gold_evidence.size();
  s.retries = trace.llm_call_count;

  std::size_t matched = 0;
  for (const auto& gold : doc.gold_evidence) {
    if (has_match(gold, trace.final_evidence, match)) ++matched;
  }
  // Precision clamps the overlap by the prediction size (several gold
  // sentences may fuzzily match one predicted sentence); recall counts the
  // matched gold directly so a fully matched gold set always has ER 1.
  const std::size_t overlap = std::min(matched, s.predicted_evidence_size);

  s.eh = (matched == s.gold_evidence_size && s.gold_evidence_size > 0) ? 1.0 : 0.0;
  s.ep = s.predicted_evidence_size == 0
             ? 0.0
             : static_cast<double>(overlap) / static_cast<double>(s.predicted_evidence_size);
  s.er = s.gold_evidence_size == 0
             ? kNaN
             : static_cast<double>(matched) / static_cast<double>(s.gold_evidence_size);
  const std::size_t len = doc.sentence_count();
  s.ecr = len == 0 ? 0.0
                   : std::min(1.0, static_cast<double>(s.predicted_evidence_size) /
                                       static_cast<double>(len));

  const bool gold_yes = doc.label == Judgement::Yes;
  const bool pred_yes = trace.final_judgement == Judgement::Yes;
  s.classified = gold_yes ? (pred_yes ? Outcome::TP : Outcome::FN)
                          : (pred_yes ? Outcome::FP : Outcome::TN);
  return s;
}

namespace detail {

// EHR = TPR * EHRC degenerates when a denominator vanishes: with no true
// positives the rate over positives must be 0, and with no positives at all
// the identity is vacuous.
inline double identity_residual(double rate_pos, double rate_correct, double tpr,
                                std::size_t n_correct) {
  if (std::isnan(rate_pos)) return 0.0;
  if (n_correct == 0) return std::fabs(rate_pos);
  return std::fabs(rate_pos - tpr * rate_correct);
}

}  // namespace detail

/// Dataset-level aggregation. Evidence rates average over the positives
/// (D+); the "when correct" variants average over the true positives (D++).
/// Zero-denominator aggregates are NaN, never 0.
inline EvaluationReport aggregate(const std::vector<PerDocScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("aggregate: empty score list");
  EvaluationReport r;
  r.n = scores.size();

  double sum_eh_pos = 0, sum_ep_pos = 0, sum_er_pos = 0, sum_ecr_pos = 0;
  double sum_eh_tp = 0, sum_ep_tp = 0, sum_er_tp = 0;
  double sum_pred_pos = 0, sum_pred_neg = 0, sum_pred_all = 0;
  double sum_calls_pos = 0, sum_calls_neg = 0, sum_calls_all = 0;

  for (const auto& s : scores) {
    switch (s.classified) {
      case Outcome::TP: ++r.tp; break;
      case Outcome::FP: ++r.fp; break;
      case Outcome::TN: ++r.tn; break;
      case Outcome::FN: ++r.fn; break;
    }
    const auto pred = static_cast<double>(s.predicted_evidence_size);
    const auto calls = static_cast<double>(s.retries);
    sum_pred_all += pred;
    sum_calls_all += calls;
    if (is_positive(s.classified)) {
      sum_eh_pos += s.eh;
      sum_ep_pos += s.ep;
      sum_er_pos += s.er;
      sum_ecr_pos += s.ecr;
      sum_pred_pos += pred;
      sum_calls_pos += calls;
      if (s.classified == Outcome::TP) {
        sum_eh_tp += s.eh;
        sum_ep_tp += s.ep;
        sum_er_tp += s.er;
      }
    } else {
      sum_pred_neg += pred;
      sum_calls_neg += calls;
    }
  }

  r.positives = r.tp + r.fn;
  r.true_positives = r.tp;
  const auto mean = [](double sum, std::size_t count) {
    return count == 0 ? kNaN : sum / static_cast<double>(count);
  };

  r.accuracy = mean(static_cast<double>(r.tp + r.tn), r.n);
  r.precision = mean(static_cast<double>(r.tp), r.tp + r.fp);
  r.recall_tpr = mean(static_cast<double>(r.tp), r.tp + r.fn);
  r.fpr = mean(static_cast<double>(r.fp), r.tn + r.fp);
  r.tnr = mean(static_cast<double>(r.tn), r.tn + r.fp);
  r.fnr = mean(static_cast<double>(r.fn), r.tp + r.fn);
  const double pr = r.precision + r.recall_tpr;
  r.f1 = (std::isnan(pr) || pr == 0.0) ? kNaN : 2.0 * r.precision * r.recall_tpr / pr;

  r.ehr = mean(sum_eh_pos, r.positives);
  r.epr = mean(sum_ep_pos, r.positives);
  r.err = mean(sum_er_pos, r.positives);
  r.aecr = mean(sum_ecr_pos, r.positives);
  r.ehrc = mean(sum_eh_tp, r.tp);
  r.eprc = mean(sum_ep_tp, r.tp);
  r.errc = mean(sum_er_tp, r.tp);

  const std::size_t negatives = r.n - r.positives;
  r.avg_sentences_pos = mean(sum_pred_pos, r.positives);
  r.avg_sentences_neg = mean(sum_pred_neg, negatives);
  r.avg_sentences_all = mean(sum_pred_all, r.n);
  r.avg_retries_pos = mean(sum_calls_pos, r.positives);
  r.avg_retries_neg = mean(sum_calls_neg, negatives);
  r.avg_retries_all = mean(sum_calls_all, r.n);

  r.residual_ehr = detail::identity_residual(r.ehr, r.ehrc, r.recall_tpr, r.tp);
  r.residual_epr = detail::identity_residual(r.epr, r.eprc, r.recall_tpr, r.tp);
  r.residual_err = detail::identity_residual(r.err, r.errc, r.recall_tpr, r.tp);
  return r;
}

/// The three identity residuals. Anything above ~1e-9 signals a convention
/// violation (e.g. a nonzero evidence score on a document classified No).
inline std::array<double, 3> verify_identities(const EvaluationReport& r) {
  return {detail::identity_residual(r.ehr, r.ehrc, r.recall_tpr, r.tp),
          detail::identity_residual(r.epr, r.eprc, r.recall_tpr, r.tp),
          detail::identity_residual(r.err, r.errc, r.recall_tpr, r.tp)};
}

inline constexpr double kIdentityFailThreshold = 1e-9;

/// Flip and evidence-retention analysis of a filter stage. `pre` is the
/// unfiltered run, `post` the filtered one; both must cover the same doc ids.
/// "Found" means some gold sentence has an approximate match in the
/// pre-filter evidence; "kept" means that still holds after the filter.
inline FilterErrorReport filter_error_analysis(const std::vector<PredictionTrace>& pre,
                                               const std::vector<PredictionTrace>& post,
                                               const std::vector<Document>& docs,
                                               const MatchConfig& match) {
  std::map<std::string, const PredictionTrace*> pre_by_id, post_by_id;
  for (const auto& t : pre) pre_by_id[t.doc_id] = &t;
  for (const auto& t : post) post_by_id[t.doc_id] = &t;
  if (pre_by_id.size() != pre.size() || post_by_id.size() != post.size())
    throw AlignmentError("filter_error_analysis: duplicate doc ids in traces");

  FilterErrorReport r;
  for (const auto& doc : docs) {
    const auto ip = pre_by_id.find(doc.id);
    const auto iq = post_by_id.find(doc.id);
    if (ip == pre_by_id.end() || iq == post_by_id.end())
      throw AlignmentError("filter_error_analysis: no trace pair for doc " + doc.id);
    const PredictionTrace& a = *ip->second;
    const PredictionTrace& b = *iq->second;

    if (a.final_judgement != b.final_judgement) {
      ++r.flip_count;
      if (b.final_judgement == doc.label) ++r.wrong_to_correct;
      if (a.final_judgement == doc.label) ++r.correct_to_wrong;
    }
    if (doc.label == Judgement::Yes) {
      const bool found = std::any_of(doc.gold_evidence.begin(), doc.gold_evidence.end(),
                                     [&](const std::string& g) {
                                       return has_match(g, a.final_evidence, match);
                                     });
      if (found) {
        ++r.found_count;
        const bool kept = std::any_of(doc.gold_evidence.begin(), doc.gold_evidence.end(),
                                      [&](const std::string& g) {
                                        return has_match(g, b.final_evidence, match);
                                      });
        if (kept) ++r.kept_count;
      }
    }
  }

  const auto rate = [](std::size_t num, std::size_t den) {
    return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
  };
  r.rate_wrong_to_correct_given_flip = rate(r.wrong_to_correct, r.flip_count);
  r.rate_correct_to_wrong_given_flip = rate(r.correct_to_wrong, r.flip_count);
  r.rate_evidence_kept_given_found = rate(r.kept_count, r.found_count);
  r.rate_evidence_discarded_given_found = rate(r.found_count - r.kept_count, r.found_count);
  return r;
}

}  // namespace contracheck
