#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "contracheck/backend.hpp"
#include "contracheck/dataset.hpp"
#include "contracheck/pipeline.hpp"
#include "contracheck/prompts.hpp"
#include "contracheck/tfidf.hpp"

namespace contracheck {

/// Deterministic synthetic dataset + companion replay fixture. The scripted
/// behavior knobs control how the canned model acts: whether it answers Yes,
/// whether its evidence includes the gold sentence, how much extra evidence it
/// adds, how long it keeps retrying, and how the filters prune. Identical
/// specs produce byte-identical outputs.
struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t n_pos = 10;
  std::size_t n_neg = 10;
  std::size_t min_sentences = 8;
  std::size_t max_sentences = 16;
  std::size_t vocabulary_size = 300;
  MatchConfig match;

  // scripted model behavior
  double yes_rate_pos = 0.75;      // P(round-1 Yes | positive doc)
  double yes_rate_neg = 0.35;      // P(round-1 Yes | negative doc)
  double hit_rate = 0.7;           // P(evidence includes the gold sentence | it survives)
  std::size_t max_extra_evidence = 2;
  double continue_rate = 0.5;      // P(Yes again | previous round Yes)
  std::size_t max_script_rounds = 4;
  double malformed_rate = 0.03;    // P(a detect response is unparseable garbage)
  double uf_keep_rate = 0.6;       // unconstrained filter: per-sentence keep probability
  double cf_keep_rate = 0.7;       // constrained filter: per-sentence keep probability
  double cf_empty_rate = 0.05;     // P(constrained filter misbehaves and returns [])

  void validate() const {
    match.validate();
    if (min_sentences == 0 || max_sentences < min_sentences)
      throw std::invalid_argument("SynthSpec: bad sentences_per_doc range");
    if (vocabulary_size == 0) throw std::invalid_argument("SynthSpec: vocabulary_size must be > 0");
  }
};

struct SynthResult {
  std::vector<Document> docs;
  std::map<std::string, std::string> fixture;  // prompt digest -> raw response
};

namespace synth_detail {

// mt19937_64 raw output is standardized; std distributions are not, so all
// draws go through these helpers.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);  // 2^53
}

inline bool chance(std::mt19937_64& rng, double p) { return unit(rng) < p; }

inline std::vector<std::string> make_vocabulary(std::mt19937_64& rng, std::size_t size) {
  static const char* kSyllables[] = {"ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du",
                                     "ka", "ke", "ki", "ko", "ku", "la", "le", "li", "lo", "lu",
                                     "ma", "me", "mi", "mo", "mu", "na", "ne", "ni", "no", "nu",
                                     "ra", "re", "ri", "ro", "ru", "sa", "se", "si", "so", "su",
                                     "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "vo", "vu"};
  constexpr std::size_t kCount = sizeof(kSyllables) / sizeof(kSyllables[0]);
  std::set<std::string> seen;
  std::vector<std::string> vocab;
  while (vocab.size() < size) {
    const std::size_t syllables = 2 + draw(rng, 2);
    std::string word;
    for (std::size_t s = 0; s < syllables; ++s) word += kSyllables[draw(rng, kCount)];
    if (seen.size() > 4 * size) word += std::to_string(vocab.size());  // tiny syllable space
    if (seen.insert(word).second) vocab.push_back(word);
  }
  return vocab;
}

// Distinct sentence positions, ascending.
inline std::vector<std::size_t> pick_distinct(std::mt19937_64& rng, std::size_t k,
                                              std::size_t size) {
  std::set<std::size_t> picked;
  while (picked.size() < k && picked.size() < size) picked.insert(draw(rng, size));
  return {picked.begin(), picked.end()};
}

}  // namespace synth_detail

/// Generates documents plus a replay fixture covering every prompt each
/// approach will issue (direct prompting, every retry round, and both filter
/// calls). The simulation applies the same redaction the pipeline uses, so
/// prompts line up digest-for-digest.
inline SynthResult generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  using namespace synth_detail;
  std::mt19937_64 rng(spec.seed);
  SynthResult out;

  const auto vocab = make_vocabulary(rng, spec.vocabulary_size);
  static const char* kTypes[] = {"negation", "numeric",  "content", "perspective",
                                 "emotion",  "relation", "factual", "causal"};
  std::uint64_t salt = 0;

  const std::size_t total = spec.n_pos + spec.n_neg;
  for (std::size_t d = 0; d < total; ++d) {
    const bool positive = d < spec.n_pos;
    Document doc;
    doc.id = "synth-" + std::to_string(spec.seed) + "-" + std::to_string(d);
    const std::size_t count =
        spec.min_sentences + draw(rng, spec.max_sentences - spec.min_sentences + 1);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t words = 5 + draw(rng, 5);
      std::string text;
      for (std::size_t w = 0; w < words; ++w) {
        if (!text.empty()) text.push_back(' ');
        text += vocab[draw(rng, vocab.size())];
      }
      text += " u" + std::to_string(salt++);  // globally unique token per sentence
      text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
      text.push_back('.');
      doc.sentences.push_back(Sentence{std::move(text), i});
    }
    if (positive) {
      doc.label = Judgement::Yes;
      doc.gold_evidence = {doc.sentences[draw(rng, count)].text};
      doc.contradiction_type = kTypes[d % 8];
    }

    // Script the detect chain, mirroring the retry loop's redaction.
    std::vector<Sentence> working = doc.sentences;
    std::vector<std::string> evidence_union;
    for (std::size_t round = 1;; ++round) {
      const std::string prompt = render_prompt(PromptKind::Detect, document_text(working));
      const std::string key = LlmBackend::replay_key(prompt);

      if (chance(rng, spec.malformed_rate)) {
        out.fixture[key] = "I looked at the document but the result refused to be JSON.";
        break;  // the pipeline falls back to No and stops
      }
      const double yes_p = round == 1 ? (positive ? spec.yes_rate_pos : spec.yes_rate_neg)
                                      : spec.continue_rate;
      const bool yes = round <= spec.max_script_rounds && chance(rng, yes_p);
      if (!yes) {
        out.fixture[key] = nlohmann::json{{"judgement", "no"}, {"evidence", nlohmann::json::array()}}.dump();
        break;
      }

      std::vector<std::string> evidence;
      std::size_t want = 1 + draw(rng, spec.max_extra_evidence + 1);
      const auto picks = pick_distinct(rng, want, working.size());
      for (const auto p : picks) evidence.push_back(working[p].text);
      if (positive && chance(rng, spec.hit_rate)) {
        const std::string& gold = doc.gold_evidence.front();
        const bool gold_alive = std::any_of(working.begin(), working.end(),
                                            [&](const Sentence& s) { return s.text == gold; });
        if (gold_alive &&
            std::find(evidence.begin(), evidence.end(), gold) == evidence.end()) {
          evidence.push_back(gold);
        }
      }
      out.fixture[key] = nlohmann::json{{"judgement", "yes"}, {"evidence", evidence}}.dump();
      append_unique(evidence_union, evidence);

      RedactResult red = redact(working, evidence, spec.match);
      if (red.sentences.empty()) break;
      working = std::move(red.sentences);
    }

    // Filter prompts are only issued when the accumulated evidence is non-empty.
    if (!evidence_union.empty()) {
      const auto subset = [&](double keep_rate) {
        std::vector<std::string> kept;
        for (const auto& s : evidence_union) {
          if (chance(rng, keep_rate)) kept.push_back(s);
        }
        return kept;
      };
      const std::string uf_prompt = render_prompt(PromptKind::FilterUnconstrained, evidence_union);
      out.fixture[LlmBackend::replay_key(uf_prompt)] =
          nlohmann::json{{"evidence", subset(spec.uf_keep_rate)}}.dump();

      const std::string cf_prompt = render_prompt(PromptKind::FilterConstrained, evidence_union);
      std::vector<std::string> cf_kept;
      if (!chance(rng, spec.cf_empty_rate)) {
        cf_kept = subset(spec.cf_keep_rate);
        if (cf_kept.empty()) cf_kept.push_back(evidence_union[draw(rng, evidence_union.size())]);
      }
      out.fixture[LlmBackend::replay_key(cf_prompt)] =
          nlohmann::json{{"evidence", cf_kept}}.dump();
    }

    out.docs.push_back(std::move(doc));
  }
  return out;
}

inline void save_replay_fixture(const std::filesystem::path& path,
                                const std::map<std::string, std::string>& fixture) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << nlohmann::json(fixture).dump(1) << '\n';
}

}  // namespace contracheck
