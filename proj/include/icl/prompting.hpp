#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icl/corpus.hpp"

namespace icl {

enum class Role { kSystem, kUser };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

enum class ScenarioKind { kZeroShot, kRandomK, kRetrieveK };

struct Scenario {
  ScenarioKind kind = ScenarioKind::kZeroShot;
  std::size_t k = 0;
  std::uint64_t seed = 0;  // random_k only

  static Scenario zero_shot() { return {}; }
  static Scenario random_k(std::size_t k, std::uint64_t seed) { return {ScenarioKind::kRandomK, k, seed}; }
  static Scenario retrieve_k(std::size_t k) { return {ScenarioKind::kRetrieveK, k, 0}; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// zero_shot / random_k / retrieve_k
std::string_view to_string(ScenarioKind kind);
/// Accepts the report names above and the CLI names none / random / retrieve.
ScenarioKind parse_scenario_kind(std::string_view text);
/// Row label used in result tables: "Without ICL", "Random ICL", "Retrieve ICL".
std::string_view scenario_label(ScenarioKind kind);

/// Display name for a language code (zh -> Chinese); unknown codes are returned unchanged.
std::string language_name(std::string_view code);

/// One block per pair, "<Src>: <source>\n<Tgt>: <target>\n", blocks separated by one
/// blank line.
std::string format_examples(std::span<const SentencePair> pairs, const LangPair& lang_pair);

/// k distinct pairs drawn uniformly without replacement, in draw order. Deterministic in seed.
/// Throws KExceedsPool when k > |dselect|.
std::vector<SentencePair> select_random_examples(const ParallelCorpus& dselect, std::size_t k,
                                                 std::uint64_t seed);

/// The two-message translation prompt: system rules (plus examples when given) and the
/// user request. Throws Error if a zero-shot scenario is given examples.
std::vector<ChatMessage> build_messages(const Scenario& scenario, std::string_view src_text,
                                        std::span<const SentencePair> examples,
                                        const LangPair& lang_pair);

/// Exact audit form: [{"role": ..., "content": ...}, ...]
std::string messages_to_json(std::span<const ChatMessage> messages, int indent = 2);

}  // namespace icl
