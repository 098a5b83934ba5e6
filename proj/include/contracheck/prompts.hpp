#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace contracheck {

enum class PromptKind { Detect, FilterUnconstrained, FilterConstrained };

inline const char* to_string(PromptKind k) {
  switch (k) {
    case PromptKind::Detect: return "detect";
    case PromptKind::FilterUnconstrained: return "filter_unconstrained";
    case PromptKind::FilterConstrained: return "filter_constrained";
  }
  return "?";
}

namespace prompts {

// Built-in templates. Each must stay byte-identical to the asset file of the
// same name under assets/prompts/ (a test pins both against fixed digests).
inline constexpr std::string_view kDetectTemplate =
    "The task is to determine whether the document contains any self-contradictions. If yes, "
    "provide evidence by quoting mutually contradictory sentences in a list of strings in "
    "Python. If no, then give an empty list. Your response must follow this JSON format (OR "
    "options are provided), and provide absolutely nothing else. Strictly follow the double "
    "quotation marks and only use single quotations within each sentence.\n"
    "\n"
    "### JSON format\n"
    "{\n"
    "    \"judgement\": \"yes\" OR \"no\",\n"
    "    \"evidence\": [\"sentence1\", \"sentence2\", ..., \"sentenceN\"] OR []\n"
    "}\n"
    "\n"
    "### document\n"
    "{document}\n";

inline constexpr std::string_view kFilterUnconstrainedTemplate =
    "You will be given a list of sentences that are flagged to be potentially inconsistent. "
    "Your task is to identify all inconsistent sentences and output them in the following JSON "
    "format, and provide absolutely nothing else. Strictly follow the double quotation marks "
    "and only use single quotations within each sentence.\n"
    "\n"
    "### JSON format\n"
    "{\n"
    "    \"evidence\": [\"sentence1\", \"sentence2\", ..., \"sentenceN\"] OR []\n"
    "}\n"
    "\n"
    "### potentially inconsistent list of sentences\n"
    "{list of inconsistent sentences}\n";

inline constexpr std::string_view kFilterConstrainedTemplate =
    "You will be given a list of sentences that are flagged to be potentially inconsistent. "
    "Your task is to identify all inconsistent sentences and output them in the following JSON "
    "format, and provide absolutely nothing else. You must output at least 1 sentence. Strictly "
    "follow the double quotation marks and only use single quotations within each sentence.\n"
    "\n"
    "### JSON format\n"
    "{\n"
    "    \"evidence\": [\"sentence1\", \"sentence2\", ..., \"sentenceN\"]\n"
    "}\n"
    "\n"
    "### potentially inconsistent list of sentences\n"
    "{list of inconsistent sentences}\n";

inline constexpr std::string_view kDocumentPlaceholder = "{document}";
inline constexpr std::string_view kSentenceListPlaceholder = "{list of inconsistent sentences}";

inline std::string_view template_for(PromptKind kind) {
  switch (kind) {
    case PromptKind::Detect: return kDetectTemplate;
    case PromptKind::FilterUnconstrained: return kFilterUnconstrainedTemplate;
    case PromptKind::FilterConstrained: return kFilterConstrainedTemplate;
  }
  throw std::logic_error("unknown PromptKind");
}

inline std::string asset_filename(PromptKind kind) {
  return std::string(to_string(kind)) + ".txt";
}

inline std::string read_asset(const std::filesystem::path& prompt_dir, PromptKind kind) {
  const auto path = prompt_dir / asset_filename(kind);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read prompt asset: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string substitute(std::string_view tmpl, std::string_view placeholder,
                              std::string_view payload) {
  const auto pos = tmpl.find(placeholder);
  if (pos == std::string_view::npos) throw std::logic_error("prompt template lost its placeholder");
  std::string out;
  out.reserve(tmpl.size() + payload.size());
  out.append(tmpl.substr(0, pos));
  out.append(payload);
  out.append(tmpl.substr(pos + placeholder.size()));
  return out;
}

}  // namespace prompts

/// Detect prompt for a document's text. Only PromptKind::Detect is valid here.
inline std::string render_prompt(PromptKind kind, std::string_view document) {
  if (kind != PromptKind::Detect)
    throw std::invalid_argument("render_prompt: filter prompts take a sentence list");
  return prompts::substitute(prompts::template_for(kind), prompts::kDocumentPlaceholder, document);
}

/// Filter prompt for a flagged sentence list, serialized as a JSON array of
/// strings. Only the filter kinds are valid here.
inline std::string render_prompt(PromptKind kind, const std::vector<std::string>& sentences) {
  if (kind == PromptKind::Detect)
    throw std::invalid_argument("render_prompt: the detect prompt takes a document");
  const std::string payload = nlohmann::json(sentences).dump();
  return prompts::substitute(prompts::template_for(kind), prompts::kSentenceListPlaceholder,
                             payload);
}

}  // namespace contracheck
