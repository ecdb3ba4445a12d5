#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icl/comet.hpp"
#include "icl/corpus.hpp"
#include "icl/llm_client.hpp"
#include "icl/metrics.hpp"
#include "icl/prompting.hpp"
#include "icl/retriever.hpp"

namespace icl {

/// Where the training (pool) and test corpora of one language pair live. Each side is
/// either a pair of line-aligned files or a single TSV file.
struct CorpusSource {
  std::filesystem::path train_src, train_tgt, train_tsv;
  std::filesystem::path test_src, test_tgt, test_tsv;
};

struct ExperimentConfig {
  std::vector<LangPair> lang_pairs;
  std::vector<ScenarioKind> scenarios{ScenarioKind::kZeroShot, ScenarioKind::kRandomK,
                                      ScenarioKind::kRetrieveK};
  std::size_t k = 4;
  std::size_t pool_size = 10000;
  std::size_t test_size = 100;
  RetrievalMode retrieval_mode = RetrievalMode::kCorpusFit;
  std::string backend_type = "http";  // http | mock | echo
  BackendConfig backend;
  std::optional<std::string> scorer;
  std::uint64_t seed = 0;
  /// Draw the pool as a seeded sample instead of the corpus prefix.
  std::optional<std::uint64_t> pool_sample_seed;
  std::filesystem::path output_path;  // JSON report; empty = do not write
  std::filesystem::path table_path;   // text table; defaults to output_path with .txt
  std::map<std::string, CorpusSource> corpora;  // keyed by LangPair::str()

  /// Throws ConfigError.
  void validate() const;
  Scenario scenario(ScenarioKind kind) const;
};

/// Reads the flat JSON config document. Relative corpus and output paths are resolved
/// against the config file's directory; the API key comes from backend.api_key or the
/// environment variable named by backend.api_key_env (default ICL_API_KEY).
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir = {});

/// Only the backend.* keys of a flat config document. Returns the backend type.
std::string parse_backend_config(std::string_view json_text, BackendConfig& out);

/// http -> HttpChatBackend; mock -> default-rule mock; echo -> mock echoing the user message.
std::unique_ptr<ChatBackend> make_backend(std::string_view type, const BackendConfig& config);

/// Source of demonstrations for the retrieve scenario.
class DemonstrationRetriever {
 public:
  virtual ~DemonstrationRetriever() = default;
  virtual std::vector<ScoredPair> retrieve(std::string_view prompt, std::size_t k) = 0;
};

class TfidfRetriever final : public DemonstrationRetriever {
 public:
  TfidfRetriever(std::shared_ptr<const RetrievalIndex> index, RetrievalMode mode)
      : index_(std::move(index)), mode_(mode) {}
  std::vector<ScoredPair> retrieve(std::string_view prompt, std::size_t k) override {
    return retrieve_top_k(*index_, prompt, k, mode_);
  }

 private:
  std::shared_ptr<const RetrievalIndex> index_;
  RetrievalMode mode_;
};

struct SentenceRecord {
  std::size_t index = 0;
  std::string source;
  std::string hypothesis;
  std::string reference;
  std::vector<std::size_t> retrieved_indices;  // pool indices of the demonstrations used
  std::vector<double> scores;                  // retrieval scores (retrieve scenario only)
  std::optional<double> comet;
};

struct ScenarioResult {
  LangPair lang_pair;
  Scenario scenario;
  std::string label;  // table row label
  std::size_t pool_size = 0;
  bool ok = true;
  std::string error;                            // set when !ok
  std::optional<std::size_t> failed_sentence;   // sentence that aborted the cell
  BleuScore bleu;
  std::optional<double> comet_mean;
  std::string comet_checkpoint;
  std::string comet_error;
  std::vector<SentenceRecord> per_sentence;
};

struct ExperimentReport {
  std::string kind = "experiment";  // experiment | ablation
  std::string config_json;          // snapshot, secrets omitted
  std::string backend_model;
  std::string started_at, finished_at;
  std::vector<ScenarioResult> results;
};

/// Everything one (language pair, scenario) cell needs.
struct CellInputs {
  LangPair lang_pair;
  const ParallelCorpus* dselect = nullptr;
  const ParallelCorpus* test_set = nullptr;
  DemonstrationRetriever* retriever = nullptr;  // required for retrieve_k only
  ChatBackend* backend = nullptr;
  const CometScorer* scorer = nullptr;
  std::size_t max_in_flight = 1;
};

/// Translates every test sentence under `scenario`, then scores with BLEU (target-language
/// tokenizer) and, when a scorer is given, COMET. A failing sentence aborts the cell: the
/// returned result has ok == false and keeps the sentences completed before it.
ScenarioResult run_scenario(const CellInputs& inputs, const Scenario& scenario);

/// Runs experiment cells from a config, caching corpora and indices per language pair.
class ExperimentRunner {
 public:
  using RetrieverFactory = std::function<std::unique_ptr<DemonstrationRetriever>(
      const ParallelCorpus& dselect, const LangPair& lang_pair)>;

  /// backend == nullptr builds one from the config; factory == nullptr uses TF-IDF retrieval.
  explicit ExperimentRunner(ExperimentConfig config, std::shared_ptr<ChatBackend> backend = nullptr,
                            RetrieverFactory factory = nullptr);

  const ExperimentConfig& config() const { return config_; }

  ScenarioResult run_scenario(const LangPair& lang_pair, const Scenario& scenario);

  /// Every (language pair x scenario) cell, in config order. Failed cells are recorded and
  /// the run continues. Writes the report after each cell when output_path is set.
  ExperimentReport run_experiment();

  /// The retrieve scenario once per pool size for every configured language pair.
  ExperimentReport run_size_ablation(std::span<const std::size_t> sizes);

 private:
  struct LoadedPair {
    ParallelCorpus train;
    ParallelCorpus test;
  };
  const LoadedPair& corpora(const LangPair& lang_pair);
  ScenarioResult run_cell(const LangPair& lang_pair, const Scenario& scenario,
                          std::size_t pool_size, std::string label);
  void persist(const ExperimentReport& report) const;

  ExperimentConfig config_;
  std::shared_ptr<ChatBackend> backend_;
  RetrieverFactory factory_;
  std::optional<CometScorer> scorer_;
  std::map<std::string, LoadedPair> loaded_;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_size_ablation(const ExperimentConfig& config, std::span<const std::size_t> sizes);

/// Full report as JSON. Wall-clock times live only under the "timestamps" key.
std::string report_to_json(const ExperimentReport& report);

/// Plain-text table: a header row, then per language pair its name followed by one row
/// per cell with COMET and BLEU to 4 decimals ("-" when absent, FAILED for failed cells).
std::string render_table(const ExperimentReport& report);

std::string config_snapshot_json(const ExperimentConfig& config);

}  // namespace icl
