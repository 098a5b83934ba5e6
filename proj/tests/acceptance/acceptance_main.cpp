// Acceptance suite: structural and property checks over the full pipeline,
// run offline against scripted replay backends. Prints one line per
// criterion; exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contracheck/dataset.hpp"
#include "contracheck/digest.hpp"
#include "contracheck/metrics.hpp"
#include "contracheck/pipeline.hpp"
#include "contracheck/prompts.hpp"
#include "contracheck/report_io.hpp"
#include "contracheck/synth.hpp"
#include "contracheck/trace_io.hpp"
#include "oracle.hpp"

using namespace contracheck;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail = "") {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!ok) ++g_failures;
}

void skip(int criterion, const std::string& what, const std::string& why) {
  std::cout << "[SKIP] criterion " << criterion << ": " << what << " (" << why << ")\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool bitwise_or_both_nan(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CONTRACHECK_CLI_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct SweepResult {
  // accumulated worst-case diagnostics across the whole sweep
  double max_residual = 0.0;
  double max_oracle_delta = 0.0;
  std::size_t datasets = 0;
  std::size_t documents = 0;
  bool identities_ok = true;
  bool oracle_ok = true;
  bool redact_chain_ok = true;
  bool invariance_ok = true;
  bool cf_flips_zero = true;
  bool superset_ok = true;
  bool rate_monotone_ok = true;
  bool degeneracy_ok = true;
  bool no_failed_traces = true;
  std::string first_problem;
};

void note_problem(SweepResult& sweep, bool& flag, const std::string& msg) {
  flag = false;
  if (sweep.first_problem.empty()) sweep.first_problem = msg;
}

double oracle_delta(const EvaluationReport& lib, const oracle::Report& ref) {
  const std::pair<double, double> pairs[] = {
      {lib.accuracy, ref.accuracy},
      {lib.precision, ref.precision},
      {lib.recall_tpr, ref.recall_tpr},
      {lib.f1, ref.f1},
      {lib.fpr, ref.fpr},
      {lib.tnr, ref.tnr},
      {lib.fnr, ref.fnr},
      {lib.ehr, ref.ehr},
      {lib.ehrc, ref.ehrc},
      {lib.epr, ref.epr},
      {lib.eprc, ref.eprc},
      {lib.err, ref.err},
      {lib.errc, ref.errc},
      {lib.aecr, ref.aecr},
      {lib.avg_sentences_pos, ref.avg_sentences_pos},
      {lib.avg_sentences_neg, ref.avg_sentences_neg},
      {lib.avg_sentences_all, ref.avg_sentences_all},
      {lib.avg_retries_pos, ref.avg_retries_pos},
      {lib.avg_retries_neg, ref.avg_retries_neg},
      {lib.avg_retries_all, ref.avg_retries_all}};
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    if (std::isnan(a) && std::isnan(b)) continue;
    if (std::isnan(a) != std::isnan(b)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::fabs(a - b));
  }
  return worst;
}

SynthSpec sweep_spec(std::size_t i) {
  SynthSpec spec;
  spec.seed = 1000 + i;
  const std::size_t total = 20 + (i * 7) % 31;  // 20..50 docs
  spec.n_pos = 8 + (i * 3) % (total - 16);
  spec.n_neg = total - spec.n_pos;
  spec.min_sentences = 6;
  spec.max_sentences = 14;
  spec.vocabulary_size = 160 + 10 * (i % 8);
  spec.yes_rate_pos = 0.5 + 0.04 * static_cast<double>(i % 12);
  spec.yes_rate_neg = 0.2 + 0.05 * static_cast<double>(i % 8);
  spec.hit_rate = 0.3 + 0.05 * static_cast<double>(i % 10);
  spec.continue_rate = 0.3 + 0.04 * static_cast<double>(i % 12);
  spec.max_extra_evidence = 1 + i % 3;
  spec.malformed_rate = (i % 4 == 0) ? 0.06 : 0.0;
  spec.uf_keep_rate = 0.4 + 0.05 * static_cast<double>(i % 10);
  spec.cf_keep_rate = 0.5 + 0.05 * static_cast<double>(i % 8);
  spec.cf_empty_rate = (i % 5 == 0) ? 0.1 : 0.02;
  return spec;
}

SweepResult run_sweep(std::size_t n_datasets) {
  SweepResult sweep;
  const MatchConfig match;
  const std::vector<Approach> approaches = {Approach::DP, Approach::RnR, Approach::RnRUF,
                                            Approach::RnRCF};

  for (std::size_t i = 0; i < n_datasets; ++i) {
    const SynthSpec spec = sweep_spec(i);
    const SynthResult synth = generate_synthetic(spec);
    ++sweep.datasets;
    sweep.documents += synth.docs.size();

    std::map<Approach, std::vector<PredictionTrace>> traces;
    std::map<Approach, EvaluationReport> reports;
    for (const Approach a : approaches) {
      LlmBackend backend(BackendConfig{}, synth.fixture);
      RunConfig cfg;
      cfg.approach = a;
      cfg.match = match;
      traces[a] = run_dataset(synth.docs, backend, cfg);

      std::vector<PerDocScore> scores;
      scores.reserve(synth.docs.size());
      for (std::size_t d = 0; d < synth.docs.size(); ++d) {
        if (traces[a][d].failed) {
          note_problem(sweep, sweep.no_failed_traces,
                       "failed trace for " + synth.docs[d].id + ": " + traces[a][d].error);
        }
        scores.push_back(score_doc(synth.docs[d], traces[a][d], match));
      }
      reports[a] = aggregate(scores);

      // criterion 1: rate identities
      for (const double r : verify_identities(reports[a])) {
        sweep.max_residual = std::max(sweep.max_residual, r);
        if (r > 1e-12)
          note_problem(sweep, sweep.identities_ok,
                       "identity residual " + std::to_string(r) + " on dataset " +
                           std::to_string(i) + " approach " + to_string(a));
      }

      // criterion 2: oracle equivalence of scoring + aggregation
      const oracle::Report ref =
          oracle::aggregate(synth.docs, traces[a], match.cosine_threshold);
      const double delta = oracle_delta(reports[a], ref);
      sweep.max_oracle_delta = std::max(sweep.max_oracle_delta, delta);
      if (!(delta <= 1e-12))
        note_problem(sweep, sweep.oracle_ok,
                     "oracle delta " + std::to_string(delta) + " on dataset " +
                         std::to_string(i) + " approach " + to_string(a));

      // criterion 6: |gold| == 1 everywhere, so EHR == ERR and EHRC == ERRC
      if (!bitwise_or_both_nan(reports[a].ehr, reports[a].err) ||
          !bitwise_or_both_nan(reports[a].ehrc, reports[a].errc))
        note_problem(sweep, sweep.degeneracy_ok,
                     "EHR/ERR divergence on dataset " + std::to_string(i));
    }

    // criterion 2 (rule iii): the retry chain's shrinking documents match a
    // brute-force redaction replay
    for (std::size_t d = 0; d < synth.docs.size(); ++d) {
      const PredictionTrace& t = traces[Approach::RnR][d];
      std::vector<std::string> working;
      for (const auto& s : synth.docs[d].sentences) working.push_back(s.text);
      for (std::size_t r = 0; r + 1 < t.rounds.size(); ++r) {
        working = oracle::redact(working, t.rounds[r].verdict.evidence, match.cosine_threshold);
        if (working.size() != t.rounds[r + 1].input_sentence_count) {
          note_problem(sweep, sweep.redact_chain_ok,
                       "redaction mismatch on " + t.doc_id + " round " + std::to_string(r + 2));
          break;
        }
      }
    }

    for (std::size_t d = 0; d < synth.docs.size(); ++d) {
      const PredictionTrace& dp = traces[Approach::DP][d];
      const PredictionTrace& rnr = traces[Approach::RnR][d];
      const PredictionTrace& cf = traces[Approach::RnRCF][d];

      // criterion 4: DP, RnR and RnR+CF classify identically
      if (dp.final_judgement != rnr.final_judgement || rnr.final_judgement != cf.final_judgement)
        note_problem(sweep, sweep.invariance_ok, "classification divergence on " + dp.doc_id);

      // criterion 5: DP evidence is a subset of RnR evidence
      const std::set<std::string> rnr_set(rnr.final_evidence.begin(), rnr.final_evidence.end());
      for (const auto& e : dp.final_evidence) {
        if (!rnr_set.count(e)) {
          note_problem(sweep, sweep.superset_ok, "evidence superset violated on " + dp.doc_id);
          break;
        }
      }
    }

    // criterion 4: the constrained filter never flips
    const FilterErrorReport cf_errors = filter_error_analysis(
        traces[Approach::RnR], traces[Approach::RnRCF], synth.docs, match);
    if (cf_errors.flip_count != 0 || cf_errors.wrong_to_correct != 0 ||
        cf_errors.correct_to_wrong != 0)
      note_problem(sweep, sweep.cf_flips_zero,
                   "constrained filter flipped on dataset " + std::to_string(i));

    // criterion 5: hit/recall rates can only improve from DP to RnR
    if (!(reports[Approach::RnR].ehr >= reports[Approach::DP].ehr) ||
        !(reports[Approach::RnR].err >= reports[Approach::DP].err))
      note_problem(sweep, sweep.rate_monotone_ok,
                   "EHR/ERR regression on dataset " + std::to_string(i));
  }
  return sweep;
}

void criterion_3_algorithm_conformance() {
  const std::vector<std::string> texts = {
      "Alpha owned the red house.",   "Beta sold nine cars monday.",
      "Gamma walked the long trail.", "Delta wrote twelve letters.",
      "Epsilon flew over the bay.",   "Zeta painted the tall fence."};
  Document doc;
  doc.id = "fixture-3round";
  for (std::size_t i = 0; i < texts.size(); ++i) doc.sentences.push_back({texts[i], i});
  doc.label = Judgement::Yes;
  doc.gold_evidence = {texts[1]};

  const MatchConfig match;
  std::map<std::string, std::string> fx;
  const auto script = [&fx](const std::vector<Sentence>& working, const std::string& response) {
    fx[LlmBackend::replay_key(
        render_prompt(PromptKind::Detect, std::string_view(document_text(working))))] = response;
  };
  script(doc.sentences, R"({"judgement":"yes","evidence":[")" + texts[1] + R"("]})");
  const auto r1 = redact(doc.sentences, {texts[1]}, match);
  script(r1.sentences, R"({"judgement":"yes","evidence":[")" + texts[4] + R"("]})");
  const auto r2 = redact(r1.sentences, {texts[4]}, match);
  script(r2.sentences, R"({"judgement":"no","evidence":[]})");
  fx[LlmBackend::replay_key(render_prompt(PromptKind::FilterConstrained,
                                          std::vector<std::string>{texts[1], texts[4]}))] =
      R"({"evidence":[")" + texts[1] + R"("]})";

  RunConfig cfg;
  LlmBackend be_rnr(BackendConfig{}, fx);
  const PredictionTrace rnr = run_rnr(doc, be_rnr, cfg);

  bool ok = rnr.final_judgement == Judgement::Yes;
  ok = ok && rnr.final_evidence == std::vector<std::string>{texts[1], texts[4]};
  ok = ok && rnr.llm_call_count == 3 && rnr.rounds.size() == 3;
  ok = ok && rnr.rounds[0].input_sentence_count == 6 && rnr.rounds[1].input_sentence_count == 5 &&
       rnr.rounds[2].input_sentence_count == 4;  // strictly shrinking
  report(3, ok, "hand-built 3-round chain follows the retry algorithm",
         "judgement=" + std::string(to_string(rnr.final_judgement)) +
             " |evidence|=" + std::to_string(rnr.final_evidence.size()) +
             " calls=" + std::to_string(rnr.llm_call_count));

  LlmBackend be_cf(BackendConfig{}, fx);
  const PredictionTrace cf = run_rnr_filtered(doc, be_cf, cfg, true);
  const bool cf_ok = cf.llm_call_count == 4 && cf.final_judgement == Judgement::Yes &&
                     cf.final_evidence == std::vector<std::string>{texts[1]};
  report(3, cf_ok, "the constrained filter costs exactly one extra call",
         "calls=" + std::to_string(cf.llm_call_count));
}

void criterion_7_prompt_fidelity() {
  const fs::path dir = fs::path(CONTRACHECK_SOURCE_DIR) / "assets" / "prompts";
  struct Pin {
    PromptKind kind;
    const char* sha;
    const char* anchor;
  };
  const Pin pins[] = {
      {PromptKind::Detect, "6445dc8c645c247a64210679d0ab790d3cdae1ce8590abee046ddf431d83700d",
       "contains any self-contradictions"},
      {PromptKind::FilterUnconstrained,
       "a1b0a40cc3faa56b1132a1b8f028ab2fc909d3f94c1dd709337f385a053048ca",
       "potentially inconsistent"},
      {PromptKind::FilterConstrained,
       "e72b066511fa07150b6785552186f906b3e21293ecf8a9f2b5bf347a69d87dad",
       "You must output at least 1 sentence"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& pin : pins) {
    const std::string asset = prompts::read_asset(dir, pin.kind);
    const std::string digest = sha256_hex(asset);
    const bool this_ok = digest == pin.sha && asset.find(pin.anchor) != std::string::npos &&
                         asset == prompts::template_for(pin.kind);
    if (!this_ok) {
      ok = false;
      detail = std::string(to_string(pin.kind)) + " digest " + digest;
    }
  }
  report(7, ok, "prompt assets match pinned digests and anchor strings", detail);
}

void criterion_8_contradoc() {
  fs::path path;
  if (const char* env = std::getenv("CONTRADOC_JSONL")) path = env;
  if (path.empty()) path = fs::path(CONTRACHECK_SOURCE_DIR) / "data" / "contradoc.jsonl";
  if (!fs::exists(path)) {
    skip(8, "ContraDoc ingestion", "no dataset at " + path.string() +
                                       "; set CONTRADOC_JSONL to enable");
    return;
  }
  try {
    const auto docs = load_dataset(path);
    const auto s = summarize(docs);
    const bool counts_ok = s.n_pos == 449 && s.n_neg == 442;
    const auto within = [](double value, double target) {
      return std::fabs(value - target) <= 0.10 * target;
    };
    const bool avg_ok = within(s.avg_sentences_pos, 38.7) && within(s.avg_sentences_neg, 36.5) &&
                        within(s.avg_sentences_all, 37.6);
    report(8, counts_ok && avg_ok, "ContraDoc export loads with the published shape",
           std::to_string(s.n_pos) + "/" + std::to_string(s.n_neg) + " docs, avg sentences " +
               std::to_string(s.avg_sentences_pos) + "/" + std::to_string(s.avg_sentences_neg) +
               "/" + std::to_string(s.avg_sentences_all));
  } catch (const std::exception& e) {
    report(8, false, "ContraDoc export loads with the published shape", e.what());
  }
}

void criterion_9_golden() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path golden = fs::path(CONTRACHECK_SOURCE_DIR) / "tests" / "golden";
  const fs::path tmp = fs::temp_directory_path() / "contracheck-acceptance-golden";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  const std::string dataset = (golden / "dataset.jsonl").string();
  const std::string fixture = (golden / "fixture.json").string();
  const int rc_run = run_cli("run --dataset " + dataset + " --approach rnr-cf --backend replay" +
                             " --fixture " + fixture + " --parallelism 2 --out " +
                             (tmp / "traces.jsonl").string());
  const int rc_score = run_cli("score --dataset " + dataset + " --traces " +
                               (tmp / "traces.jsonl").string() + " --out " +
                               (tmp / "report.json").string());
  const bool runs_ok = rc_run == 0 && rc_score == 0;

  const bool traces_ok = runs_ok && slurp(tmp / "traces.jsonl") == slurp(golden / "traces.jsonl");
  const bool report_ok = runs_ok && slurp(tmp / "report.json") == slurp(golden / "report.json");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(9, runs_ok && traces_ok && report_ok && elapsed < 10.0,
         "golden run + score reproduce the committed outputs byte-for-byte",
         "run rc=" + std::to_string(rc_run) + " score rc=" + std::to_string(rc_score) +
             " traces=" + (traces_ok ? "match" : "DIFFER") +
             " report=" + (report_ok ? "match" : "DIFFER") + " in " + std::to_string(elapsed) +
             "s");
  fs::remove_all(tmp);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult sweep = run_sweep(100);
  const double sweep_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream sweep_stats;
  sweep_stats << sweep.datasets << " datasets, " << sweep.documents << " docs, "
              << sweep_s << "s";

  report(1, sweep.identities_ok && sweep.no_failed_traces && sweep_s < 30.0,
         "EHR/EPR/ERR identities hold to 1e-12 across the randomized sweep",
         "max residual " + std::to_string(sweep.max_residual) + ", " + sweep_stats.str() +
             (sweep.first_problem.empty() ? "" : "; " + sweep.first_problem));
  report(2, sweep.oracle_ok && sweep.redact_chain_ok,
         "brute-force matching + aggregation agree with every report to 1e-12",
         "max delta " + std::to_string(sweep.max_oracle_delta) +
             (sweep.first_problem.empty() ? "" : "; " + sweep.first_problem));
  criterion_3_algorithm_conformance();
  report(4, sweep.invariance_ok && sweep.cf_flips_zero,
         "DP/RnR/RnR+CF classifications are identical and CF never flips",
         sweep.first_problem.empty() ? "" : sweep.first_problem);
  report(5, sweep.superset_ok && sweep.rate_monotone_ok,
         "DP evidence is a subset of RnR evidence and EHR/ERR never regress",
         sweep.first_problem.empty() ? "" : sweep.first_problem);
  report(6, sweep.degeneracy_ok,
         "single-sentence gold sets give EHR == ERR and EHRC == ERRC exactly", "");
  criterion_7_prompt_fidelity();
  criterion_8_contradoc();
  criterion_9_golden();

  if (g_failures > 0) {
    std::cout << g_failures << " criterion check(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
