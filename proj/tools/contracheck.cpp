// contracheck: document self-contradiction detection via LLM calls.
//
// Subcommands:
//   run                  run an approach over a dataset, writing a JSONL trace file
//   score                score traces against gold annotations into a report
//   report               compare reports side by side; optional filter error analysis
//   validate-identities  check the rate identities of one or more reports
//   gen-synth            emit a deterministic synthetic dataset + replay fixture

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contracheck/backend.hpp"
#include "contracheck/dataset.hpp"
#include "contracheck/metrics.hpp"
#include "contracheck/pipeline.hpp"
#include "contracheck/report_io.hpp"
#include "contracheck/synth.hpp"
#include "contracheck/trace_io.hpp"

namespace {

using namespace contracheck;

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct RunArgs {
  std::string dataset;
  std::string approach = "dp";
  std::string backend = "replay";
  std::string model = "replay";
  double temperature = 0.0;
  int max_rounds = 10;
  int parallelism = 1;
  double cosine_threshold = 0.8;
  std::string cache_dir;
  std::string fixture;
  std::string out = "traces.jsonl";
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 60.0;
  int max_parse_retries = 2;
  int max_inflight = 4;
};

int cmd_run(const RunArgs& a) {
  const auto approach = approach_from_string(a.approach);
  if (!approach) {
    std::cerr << "error: unknown approach '" << a.approach << "'\n";
    return kExitFatal;
  }

  BackendConfig bc;
  bc.model_name = a.model;
  bc.temperature = a.temperature;
  bc.timeout_s = a.timeout_s;
  bc.max_parse_retries = a.max_parse_retries;
  bc.max_inflight = a.max_inflight;
  bc.api_key_env = a.api_key_env;
  if (!a.cache_dir.empty()) bc.cache_dir = a.cache_dir;
  if (a.backend == "http") {
    bc.kind = BackendKind::HttpOpenAiCompat;
    bc.endpoint_url = a.endpoint;
    if (bc.endpoint_url.empty()) {
      std::cerr << "error: --endpoint is required with the http backend\n";
      return kExitFatal;
    }
    const char* key = std::getenv(bc.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      std::cerr << "error: api key environment variable " << bc.api_key_env << " is not set\n";
      return kExitFatal;
    }
  } else if (a.backend == "replay") {
    bc.kind = BackendKind::ScriptedReplay;
    if (a.fixture.empty()) {
      std::cerr << "error: --fixture is required with the replay backend\n";
      return kExitFatal;
    }
    bc.fixture_path = a.fixture;
  } else {
    std::cerr << "error: unknown backend '" << a.backend << "'\n";
    return kExitFatal;
  }

  const std::vector<Document> docs = load_dataset(a.dataset);
  const DatasetSummary sum = summarize(docs);
  std::cerr << "loaded " << docs.size() << " documents (" << sum.n_pos << " positive, "
            << sum.n_neg << " negative; avg sentences pos/neg/all " << sum.avg_sentences_pos
            << "/" << sum.avg_sentences_neg << "/" << sum.avg_sentences_all << ")\n";

  RunConfig rc;
  rc.approach = *approach;
  rc.match.cosine_threshold = a.cosine_threshold;
  rc.max_rounds = a.max_rounds;
  rc.parallelism = a.parallelism;
  rc.validate();

  LlmBackend backend(bc);

  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << a.out << "\n";
    return kExitFatal;
  }
  std::size_t failed = 0;
  long long total_calls = 0;
  const auto sink = [&](const PredictionTrace& t) {
    out << trace_to_json(t).dump() << '\n';
    total_calls += t.llm_call_count;
    if (t.failed) {
      ++failed;
      std::cerr << "  " << t.doc_id << ": FAILED (" << t.error << ")\n";
    } else {
      std::cerr << "  " << t.doc_id << ": " << to_string(t.final_judgement) << ", "
                << t.llm_call_count << " calls, |evidence|=" << t.final_evidence.size()
                << (t.truncated ? ", truncated" : "") << "\n";
    }
  };
  run_dataset(docs, backend, rc, sink);

  std::cerr << "done: " << docs.size() << " traces -> " << a.out << " (" << total_calls
            << " llm calls, " << backend.backend_calls() << " backend invocations";
  if (failed > 0) std::cerr << ", " << failed << " failed";
  std::cerr << ")\n";
  return failed == 0 ? kExitOk : kExitPartial;
}

struct ScoreArgs {
  std::string dataset;
  std::string traces;
  std::string out = "report.json";
  bool table = false;
  std::string plot_data;
  double cosine_threshold = 0.8;
  std::string model;
};

int cmd_score(const ScoreArgs& a) {
  const std::vector<Document> docs = load_dataset(a.dataset);
  const std::vector<PredictionTrace> traces = read_traces_jsonl(a.traces);

  std::map<std::string, const PredictionTrace*> by_id;
  for (const auto& t : traces) {
    if (!by_id.emplace(t.doc_id, &t).second)
      throw AlignmentError("duplicate trace for doc " + t.doc_id);
  }
  if (by_id.size() != docs.size())
    throw AlignmentError("trace count " + std::to_string(by_id.size()) +
                         " != dataset size " + std::to_string(docs.size()));

  MatchConfig match;
  match.cosine_threshold = a.cosine_threshold;

  std::vector<PerDocScore> scores;
  scores.reserve(docs.size());
  for (const auto& doc : docs) {
    const auto it = by_id.find(doc.id);
    if (it == by_id.end()) throw AlignmentError("no trace for doc " + doc.id);
    scores.push_back(score_doc(doc, *it->second, match));
  }

  EvaluationReport report = aggregate(scores);
  report.approach = traces.empty() ? "" : to_string(traces.front().approach);
  report.model = a.model;
  write_report_json(a.out, report);
  std::cerr << "report -> " << a.out << "\n";

  if (a.table) write_report_table(std::cout, {report}, {report.approach});
  if (!a.plot_data.empty()) write_plot_data(a.plot_data, {report});

  const auto residuals = verify_identities(report);
  for (const double r : residuals) {
    if (r > kIdentityFailThreshold) {
      std::cerr << "error: identity residual " << r << " exceeds " << kIdentityFailThreshold
                << " (convention violation in the traces)\n";
      return kExitFatal;
    }
  }
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> reports;
  bool compare = false;
  std::string dataset;
  std::string pre_traces;
  std::string post_traces;
  double cosine_threshold = 0.8;
};

int cmd_report(const ReportArgs& a) {
  std::vector<EvaluationReport> reports;
  std::vector<std::string> labels;
  for (const auto& path : a.reports) {
    EvaluationReport r = read_report_json(path);
    std::string label = r.approach;
    if (!r.model.empty()) label += "/" + r.model;
    if (label.empty()) label = std::filesystem::path(path).stem().string();
    labels.push_back(label);
    reports.push_back(std::move(r));
  }
  if (!reports.empty()) write_report_table(std::cout, reports, labels);

  if (!a.pre_traces.empty() || !a.post_traces.empty()) {
    if (a.pre_traces.empty() || a.post_traces.empty() || a.dataset.empty()) {
      std::cerr << "error: filter error analysis needs --dataset, --pre-traces and --post-traces\n";
      return kExitFatal;
    }
    const auto docs = load_dataset(a.dataset);
    const auto pre = read_traces_jsonl(a.pre_traces);
    const auto post = read_traces_jsonl(a.post_traces);
    MatchConfig match;
    match.cosine_threshold = a.cosine_threshold;
    const FilterErrorReport fer = filter_error_analysis(pre, post, docs, match);
    const std::string label = post.empty() ? "filter" : to_string(post.front().approach);
    std::cout << '\n';
    write_filter_error_report(std::cout, fer, label);
  }
  return kExitOk;
}

int cmd_validate_identities(const std::vector<std::string>& paths) {
  bool ok = true;
  for (const auto& path : paths) {
    const EvaluationReport r = read_report_json(path);
    const auto residuals = verify_identities(r);
    std::cout << path << ": |EHR-TPR*EHRC|=" << residuals[0] << " |EPR-TPR*EPRC|=" << residuals[1]
              << " |ERR-TPR*ERRC|=" << residuals[2] << "\n";
    for (const double v : residuals) ok = ok && !(v > kIdentityFailThreshold);
  }
  if (!ok) {
    std::cerr << "error: identity residual above " << kIdentityFailThreshold << "\n";
    return kExitFatal;
  }
  return kExitOk;
}

struct SynthArgs {
  SynthSpec spec;
  std::string out_dataset = "synth.jsonl";
  std::string out_fixture = "fixture.json";
};

int cmd_gen_synth(const SynthArgs& a) {
  const SynthResult result = generate_synthetic(a.spec);
  save_dataset(a.out_dataset, result.docs);
  save_replay_fixture(a.out_fixture, result.fixture);
  std::cerr << "wrote " << result.docs.size() << " documents -> " << a.out_dataset << " and "
            << result.fixture.size() << " scripted responses -> " << a.out_fixture << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect self-contradictions within documents via LLM calls"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file mirroring the flags (INI, [subcommand] sections)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an approach over a dataset");
  run->add_option("--dataset", run_args.dataset, "Dataset file (JSONL or JSON array)")->required();
  run->add_option("--approach", run_args.approach, "dp | rnr | rnr-uf | rnr-cf")
      ->check(CLI::IsMember({"dp", "rnr", "rnr-uf", "rnr-cf"}));
  run->add_option("--backend", run_args.backend, "http | replay")
      ->check(CLI::IsMember({"http", "replay"}));
  run->add_option("--model", run_args.model, "Model name sent to the backend");
  run->add_option("--temperature", run_args.temperature, "Sampling temperature (default 0)");
  run->add_option("--max-rounds", run_args.max_rounds, "Retry round cap");
  run->add_option("--parallelism", run_args.parallelism, "Concurrent documents");
  run->add_option("--cosine-threshold", run_args.cosine_threshold, "Approximate-match threshold");
  run->add_option("--cache-dir", run_args.cache_dir, "Response cache directory");
  run->add_option("--fixture", run_args.fixture, "Replay fixture (JSON digest->response map)");
  run->add_option("--out", run_args.out, "Output trace file (JSONL)");
  run->add_option("--endpoint", run_args.endpoint, "OpenAI-compatible base URL");
  run->add_option("--api-key-env", run_args.api_key_env, "Env var holding the API key");
  run->add_option("--timeout", run_args.timeout_s, "HTTP timeout in seconds");
  run->add_option("--max-parse-retries", run_args.max_parse_retries, "Re-invocations on bad JSON");
  run->add_option("--max-inflight", run_args.max_inflight, "Max concurrent HTTP requests");

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a trace file against its dataset");
  score->add_option("--dataset", score_args.dataset, "Dataset file")->required();
  score->add_option("--traces", score_args.traces, "Trace file from 'run'")->required();
  score->add_option("--out", score_args.out, "Report JSON output");
  score->add_flag("--table", score_args.table, "Print a plain-text metric table");
  score->add_option("--plot-data", score_args.plot_data, "Directory for plot-ready CSVs");
  score->add_option("--cosine-threshold", score_args.cosine_threshold,
                    "Approximate-match threshold");
  score->add_option("--model", score_args.model, "Model label recorded in the report");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Compare reports side by side");
  report->add_option("--reports", report_args.reports, "Report JSON files")
      ->required()
      ->expected(-1);
  report->add_flag("--compare", report_args.compare, "Side-by-side comparison (default)");
  report->add_option("--dataset", report_args.dataset, "Dataset (for filter error analysis)");
  report->add_option("--pre-traces", report_args.pre_traces, "Unfiltered traces (e.g. rnr)");
  report->add_option("--post-traces", report_args.post_traces, "Filtered traces (rnr-uf/rnr-cf)");
  report->add_option("--cosine-threshold", report_args.cosine_threshold,
                     "Approximate-match threshold");

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate-identities", "Check rate identities of reports");
  validate->add_option("--reports", validate_paths, "Report JSON files")->required()->expected(-1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("gen-synth", "Generate a synthetic dataset + replay fixture");
  synth->add_option("--seed", synth_args.spec.seed, "RNG seed");
  synth->add_option("--n-pos", synth_args.spec.n_pos, "Positive documents");
  synth->add_option("--n-neg", synth_args.spec.n_neg, "Negative documents");
  synth->add_option("--min-sentences", synth_args.spec.min_sentences, "Min sentences per doc");
  synth->add_option("--max-sentences", synth_args.spec.max_sentences, "Max sentences per doc");
  synth->add_option("--vocab", synth_args.spec.vocabulary_size, "Vocabulary size");
  synth->add_option("--yes-rate-pos", synth_args.spec.yes_rate_pos, "P(round-1 yes | positive)");
  synth->add_option("--yes-rate-neg", synth_args.spec.yes_rate_neg, "P(round-1 yes | negative)");
  synth->add_option("--hit-rate", synth_args.spec.hit_rate, "P(evidence includes gold)");
  synth->add_option("--max-extra-evidence", synth_args.spec.max_extra_evidence,
                    "Max extra evidence sentences per round");
  synth->add_option("--continue-rate", synth_args.spec.continue_rate, "P(yes again | yes)");
  synth->add_option("--max-script-rounds", synth_args.spec.max_script_rounds,
                    "Max scripted yes rounds");
  synth->add_option("--malformed-rate", synth_args.spec.malformed_rate,
                    "P(detect response is garbage)");
  synth->add_option("--uf-keep-rate", synth_args.spec.uf_keep_rate, "Unconstrained keep rate");
  synth->add_option("--cf-keep-rate", synth_args.spec.cf_keep_rate, "Constrained keep rate");
  synth->add_option("--cf-empty-rate", synth_args.spec.cf_empty_rate,
                    "P(constrained filter returns [])");
  synth->add_option("--cosine-threshold", synth_args.spec.match.cosine_threshold,
                    "Approximate-match threshold mirrored during scripting");
  synth->add_option("--out-dataset", synth_args.out_dataset, "Dataset output (JSONL)");
  synth->add_option("--out-fixture", synth_args.out_fixture, "Fixture output (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (score->parsed()) return cmd_score(score_args);
    if (report->parsed()) return cmd_report(report_args);
    if (validate->parsed()) return cmd_validate_identities(validate_paths);
    if (synth->parsed()) return cmd_gen_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
