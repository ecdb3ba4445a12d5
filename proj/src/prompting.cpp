#include "icl/prompting.hpp"

#include <json.hpp>

#include <array>
#include <utility>

#include "icl/error.hpp"
#include "icl/random.hpp"

namespace icl {

std::string_view to_string(Role role) { return role == Role::kSystem ? "system" : "user"; }

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kZeroShot: return "zero_shot";
    case ScenarioKind::kRandomK: return "random_k";
    case ScenarioKind::kRetrieveK: return "retrieve_k";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  if (text == "zero_shot" || text == "none") return ScenarioKind::kZeroShot;
  if (text == "random_k" || text == "random") return ScenarioKind::kRandomK;
  if (text == "retrieve_k" || text == "retrieve") return ScenarioKind::kRetrieveK;
  throw Error("unknown scenario: " + std::string(text));
}

std::string_view scenario_label(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kZeroShot: return "Without ICL";
    case ScenarioKind::kRandomK: return "Random ICL";
    case ScenarioKind::kRetrieveK: return "Retrieve ICL";
  }
  return "unknown";
}

std::string language_name(std::string_view code) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 12> kNames{{
      {"zh", "Chinese"}, {"ja", "Japanese"}, {"vi", "Vietnamese"}, {"en", "English"},
      {"de", "German"},  {"fr", "French"},   {"es", "Spanish"},    {"ko", "Korean"},
      {"ru", "Russian"}, {"it", "Italian"},  {"pt", "Portuguese"}, {"ar", "Arabic"},
  }};
  for (const auto& [c, name] : kNames) {
    if (c == code) return std::string(name);
  }
  return std::string(code);
}

std::string format_examples(std::span<const SentencePair> pairs, const LangPair& lang_pair) {
  const auto src = language_name(lang_pair.source);
  const auto tgt = language_name(lang_pair.target);
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += '\n';
    out += src + ": " + pairs[i].source_text + '\n';
    out += tgt + ": " + pairs[i].target_text + '\n';
  }
  return out;
}

std::vector<SentencePair> select_random_examples(const ParallelCorpus& dselect, std::size_t k,
                                                 std::uint64_t seed) {
  if (k > dselect.size()) throw KExceedsPool(k, dselect.size());
  Rng rng(seed);
  std::vector<SentencePair> out;
  out.reserve(k);
  for (auto i : sample_without_replacement(rng, dselect.size(), k)) out.push_back(dselect[i]);
  return out;
}

std::vector<ChatMessage> build_messages(const Scenario& scenario, std::string_view src_text,
                                        std::span<const SentencePair> examples,
                                        const LangPair& lang_pair) {
  if (scenario.kind == ScenarioKind::kZeroShot && !examples.empty()) {
    throw Error("zero-shot prompt cannot carry examples");
  }
  const auto src = language_name(lang_pair.source);
  const auto tgt = language_name(lang_pair.target);

  std::string system = "You are a translation assistant from " + src + " to " + tgt +
                       ". Some rules to remember:\n\n"
                       "- Do not add extra blank lines.\n"
                       "- It is important to maintain the accuracy of the contents, but we don't "
                       "want the output to read like it's been translated. So instead of "
                       "translating word by word, prioritize naturalness and ease of "
                       "communication.";
  if (!examples.empty()) {
    system += "\n\n Here are some examples that you can use to learn how to translate from " +
              src + " to " + tgt + ":\n" + format_examples(examples, lang_pair);
  }

  std::string user = " Please translate the given " + src + " sentence " + std::string(src_text) +
                     " to " + tgt +
                     " sentence and please make the translation as accurate and natural as "
                     "possible.";

  return {{Role::kSystem, std::move(system)}, {Role::kUser, std::move(user)}};
}

std::string messages_to_json(std::span<const ChatMessage> messages, int indent) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    doc.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return doc.dump(indent);
}

}  // namespace icl
