#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "contracheck/errors.hpp"
#include "contracheck/metrics.hpp"
#include "contracheck/text.hpp"

namespace contracheck {

inline const std::set<std::string>& contradiction_types() {
  static const std::set<std::string> kTypes = {"negation", "numeric",  "content", "perspective",
                                               "emotion",  "relation", "factual", "causal"};
  return kTypes;
}

struct DatasetSummary {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double avg_sentences_pos = kNaN;
  double avg_sentences_neg = kNaN;
  double avg_sentences_all = kNaN;
};

inline DatasetSummary summarize(const std::vector<Document>& docs) {
  DatasetSummary s;
  double sum_pos = 0, sum_neg = 0;
  for (const auto& d : docs) {
    if (d.label == Judgement::Yes) {
      ++s.n_pos;
      sum_pos += static_cast<double>(d.sentence_count());
    } else {
      ++s.n_neg;
      sum_neg += static_cast<double>(d.sentence_count());
    }
  }
  if (s.n_pos > 0) s.avg_sentences_pos = sum_pos / static_cast<double>(s.n_pos);
  if (s.n_neg > 0) s.avg_sentences_neg = sum_neg / static_cast<double>(s.n_neg);
  if (!docs.empty())
    s.avg_sentences_all = (sum_pos + sum_neg) / static_cast<double>(docs.size());
  return s;
}

namespace detail {

inline Document document_from_record(const nlohmann::json& rec, std::size_t ordinal) {
  const std::string where = "record " + std::to_string(ordinal);
  if (!rec.is_object()) throw SchemaError(where + ": not a JSON object");
  if (!rec.contains("id") || !rec.at("id").is_string())
    throw SchemaError(where + ": missing string field 'id'");
  Document doc;
  doc.id = rec.at("id").get<std::string>();
  const std::string ctx = "record '" + doc.id + "'";

  const bool has_text = rec.contains("text");
  const bool has_sentences = rec.contains("sentences");
  if (has_text == has_sentences)
    throw SchemaError(ctx + ": exactly one of 'text' / 'sentences' is required");

  if (has_text) {
    if (!rec.at("text").is_string()) throw SchemaError(ctx + ": 'text' must be a string");
    doc.sentences = segment_sentences(rec.at("text").get<std::string>());
  } else {
    if (!rec.at("sentences").is_array())
      throw SchemaError(ctx + ": 'sentences' must be an array of strings");
    for (const auto& s : rec.at("sentences")) {
      if (!s.is_string()) throw SchemaError(ctx + ": 'sentences' must be an array of strings");
      std::string t = trim_copy(s.get<std::string>());
      if (t.empty()) throw SchemaError(ctx + ": empty sentence");
      doc.sentences.push_back(Sentence{std::move(t), doc.sentences.size()});
    }
  }
  if (doc.sentences.empty()) throw SchemaError(ctx + ": document has no sentences");

  if (!rec.contains("label") || !rec.at("label").is_string())
    throw SchemaError(ctx + ": missing string field 'label'");
  const auto label = judgement_from_string(rec.at("label").get<std::string>());
  if (!label) throw SchemaError(ctx + ": label must be \"yes\" or \"no\"");
  doc.label = *label;

  if (!rec.contains("evidence") || !rec.at("evidence").is_array())
    throw SchemaError(ctx + ": missing array field 'evidence'");
  std::set<std::string> seen;
  for (const auto& e : rec.at("evidence")) {
    if (!e.is_string()) throw SchemaError(ctx + ": evidence entries must be strings");
    std::string t = trim_copy(e.get<std::string>());
    if (!seen.insert(t).second) throw SchemaError(ctx + ": duplicate evidence entry");
    doc.gold_evidence.push_back(std::move(t));
  }

  if ((doc.label == Judgement::Yes) != !doc.gold_evidence.empty())
    throw SchemaError(ctx + ": label yes requires non-empty evidence and label no requires none");

  // Gold evidence is exact data; every entry must equal a sentence verbatim.
  for (const auto& g : doc.gold_evidence) {
    const bool found = std::any_of(doc.sentences.begin(), doc.sentences.end(),
                                   [&](const Sentence& s) { return s.text == g; });
    if (!found)
      throw SchemaError(ctx + ": evidence entry does not exactly match any sentence: " + g);
  }

  if (rec.contains("contradiction_type") && !rec.at("contradiction_type").is_null()) {
    if (!rec.at("contradiction_type").is_string())
      throw SchemaError(ctx + ": 'contradiction_type' must be a string");
    const auto t = rec.at("contradiction_type").get<std::string>();
    if (!contradiction_types().count(t))
      throw SchemaError(ctx + ": unknown contradiction_type '" + t + "'");
    doc.contradiction_type = t;
  }
  if (rec.contains("domain") && !rec.at("domain").is_null() && !rec.at("domain").is_string())
    throw SchemaError(ctx + ": 'domain' must be a string");
  return doc;
}

}  // namespace detail

/// Loads a dataset: JSONL (one record per line) or a single JSON array.
/// Records are validated against the schema; violations raise SchemaError
/// naming the offending record.
inline std::vector<Document> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("dataset: cannot read " + path.string());

  std::vector<nlohmann::json> records;
  char first = 0;
  while (in.get(first) && ascii_space(first)) {
  }
  in.seekg(0);
  if (first == '[') {
    nlohmann::json arr = nlohmann::json::parse(in, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
      throw SchemaError("dataset: invalid JSON array in " + path.string());
    for (auto& rec : arr) records.push_back(std::move(rec));
  } else {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim_copy(line).empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded())
        throw SchemaError("dataset: invalid JSON at line " + std::to_string(lineno));
      records.push_back(std::move(rec));
    }
  }

  std::vector<Document> docs;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Document doc = detail::document_from_record(records[i], i + 1);
    if (!ids.insert(doc.id).second) throw SchemaError("dataset: duplicate id '" + doc.id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

/// Writes documents as JSONL in pre-segmented form; load(save(docs)) == docs.
inline void save_dataset(const std::filesystem::path& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& d : docs) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : d.sentences) sentences.push_back(s.text);
    nlohmann::json rec = {{"id", d.id},
                          {"sentences", sentences},
                          {"label", to_string(d.label)},
                          {"evidence", d.gold_evidence}};
    if (d.contradiction_type) rec["contradiction_type"] = *d.contradiction_type;
    out << rec.dump() << '\n';
  }
}

}  // namespace contracheck
