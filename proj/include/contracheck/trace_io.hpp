#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contracheck/errors.hpp"
#include "contracheck/pipeline.hpp"

namespace contracheck {

inline nlohmann::json trace_to_json(const PredictionTrace& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round_index},
                      {"input_sentences", r.input_sentence_count},
                      {"judgement", to_string(r.verdict.judgement)},
                      {"evidence", r.verdict.evidence},
                      {"parse_status", to_string(r.verdict.parse_status)},
                      {"raw_response", r.verdict.raw_response},
                      {"no_removal", r.no_removal}});
  }
  nlohmann::json j = {{"doc_id", t.doc_id},
                      {"approach", to_string(t.approach)},
                      {"rounds", rounds},
                      {"final_judgement", to_string(t.final_judgement)},
                      {"final_evidence", t.final_evidence},
                      {"llm_calls", t.llm_call_count},
                      {"truncated", t.truncated},
                      {"failed", t.failed},
                      {"backend", t.backend_digest}};
  if (t.filter_stage) {
    j["filter"] = {{"input", t.filter_stage->input},
                   {"output", t.filter_stage->output},
                   {"constrained", t.filter_stage->constrained},
                   {"fell_back_to_input", t.filter_stage->fell_back_to_input}};
  }
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

inline PredictionTrace trace_from_json(const nlohmann::json& j) {
  PredictionTrace t;
  try {
    t.doc_id = j.at("doc_id").get<std::string>();
    const auto approach = approach_from_string(j.at("approach").get<std::string>());
    if (!approach) throw SchemaError("trace: unknown approach");
    t.approach = *approach;
    for (const auto& rj : j.at("rounds")) {
      RoundRecord r;
      r.round_index = rj.at("round").get<int>();
      r.input_sentence_count = rj.at("input_sentences").get<std::size_t>();
      const auto judgement = judgement_from_string(rj.at("judgement").get<std::string>());
      const auto status = parse_status_from_string(rj.at("parse_status").get<std::string>());
      if (!judgement || !status) throw SchemaError("trace: bad round enum");
      r.verdict.judgement = *judgement;
      r.verdict.parse_status = *status;
      r.verdict.evidence = rj.at("evidence").get<std::vector<std::string>>();
      r.verdict.raw_response = rj.at("raw_response").get<std::string>();
      r.no_removal = rj.at("no_removal").get<bool>();
      t.rounds.push_back(std::move(r));
    }
    if (j.contains("filter")) {
      FilterStage f;
      f.input = j["filter"].at("input").get<std::vector<std::string>>();
      f.output = j["filter"].at("output").get<std::vector<std::string>>();
      f.constrained = j["filter"].at("constrained").get<bool>();
      f.fell_back_to_input = j["filter"].at("fell_back_to_input").get<bool>();
      t.filter_stage = std::move(f);
    }
    const auto final_judgement = judgement_from_string(j.at("final_judgement").get<std::string>());
    if (!final_judgement) throw SchemaError("trace: bad final_judgement");
    t.final_judgement = *final_judgement;
    t.final_evidence = j.at("final_evidence").get<std::vector<std::string>>();
    t.llm_call_count = j.at("llm_calls").get<int>();
    t.truncated = j.at("truncated").get<bool>();
    t.failed = j.at("failed").get<bool>();
    t.backend_digest = j.at("backend").get<std::string>();
    if (j.contains("error")) t.error = j["error"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("trace: ") + e.what());
  }
  return t;
}

/// One compact JSON object per line.
inline void write_traces_jsonl(const std::filesystem::path& path,
                               const std::vector<PredictionTrace>& traces) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& t : traces) out << trace_to_json(t).dump() << '\n';
}

inline std::vector<PredictionTrace> read_traces_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<PredictionTrace> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_copy(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw SchemaError("trace file: invalid JSON at line " + std::to_string(lineno));
    out.push_back(trace_from_json(j));
  }
  return out;
}

}  // namespace contracheck
