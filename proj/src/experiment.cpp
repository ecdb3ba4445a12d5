#include "icl/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "icl/error.hpp"
#include "icl/log.hpp"
#include "icl/random.hpp"

namespace icl {

using nlohmann::json;

std::unique_ptr<ChatBackend> make_backend(std::string_view type, const BackendConfig& config) {
  if (type == "http") return std::make_unique<HttpChatBackend>(config);
  if (type == "mock") return mock_backend();
  if (type == "echo") return mock_backend(MockScript{{}, {}, true});
  throw ConfigError("unknown backend type " + std::string(type));
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Demonstrations for one sentence, plus their pool indices and retrieval scores.
struct Demonstrations {
  std::vector<SentencePair> pairs;
  std::vector<std::size_t> indices;
  std::vector<double> scores;
};

Demonstrations select_demonstrations(const CellInputs& in, const Scenario& scenario,
                                     std::size_t sentence, std::string_view source) {
  Demonstrations d;
  switch (scenario.kind) {
    case ScenarioKind::kZeroShot:
      break;
    case ScenarioKind::kRandomK:
      d.pairs = select_random_examples(*in.dselect, scenario.k, derive_seed(scenario.seed, sentence));
      for (const auto& p : d.pairs) d.indices.push_back(p.index);
      break;
    case ScenarioKind::kRetrieveK:
      if (!in.retriever) throw Error("retrieve scenario without a retriever");
      for (auto& hit : in.retriever->retrieve(source, scenario.k)) {
        d.indices.push_back(hit.pair_index);
        d.scores.push_back(hit.score);
        d.pairs.push_back(std::move(hit.pair));
      }
      break;
  }
  return d;
}

}  // namespace

ScenarioResult run_scenario(const CellInputs& in, const Scenario& scenario) {
  if (!in.dselect || !in.test_set || !in.backend) throw Error("incomplete cell inputs");

  ScenarioResult result;
  result.lang_pair = in.lang_pair;
  result.scenario = scenario;
  result.label = std::string(scenario_label(scenario.kind));
  result.pool_size = in.dselect->size();

  const auto& test = *in.test_set;
  std::vector<std::optional<SentenceRecord>> records(test.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mu;
  std::optional<std::size_t> failed;
  std::string failure;

  const auto worker = [&] {
    while (!abort) {
      const auto i = next++;
      if (i >= test.size()) return;
      try {
        const auto& pair = test[i];
        auto demos = select_demonstrations(in, scenario, i, pair.source_text);
        const auto messages = build_messages(scenario, pair.source_text, demos.pairs, in.lang_pair);
        auto reply = in.backend->complete(messages);
        records[i] = SentenceRecord{i, pair.source_text, std::move(reply.text), pair.target_text,
                                    std::move(demos.indices), std::move(demos.scores), std::nullopt};
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mu);
        if (!failed || i < *failed) {
          failed = i;
          failure = e.what();
        }
        abort = true;
      }
    }
  };

  const auto threads = std::max<std::size_t>(1, std::min(in.max_in_flight, test.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& r : records) {
    if (!r) break;
    result.per_sentence.push_back(std::move(*r));
  }
  if (failed) {
    result.ok = false;
    result.failed_sentence = failed;
    result.error = "sentence " + std::to_string(*failed) + ": " + failure;
    return result;
  }

  std::vector<std::string> hyps, refs;
  for (const auto& r : result.per_sentence) {
    hyps.push_back(r.hypothesis);
    refs.push_back(r.reference);
  }
  result.bleu = corpus_bleu(hyps, refs, in.lang_pair.target);

  if (in.scorer) {
    try {
      std::vector<CometRecord> batch;
      for (const auto& r : result.per_sentence) batch.push_back({r.source, r.hypothesis, r.reference});
      auto comet = in.scorer->score(batch);
      for (std::size_t i = 0; i < comet.scores.size(); ++i) result.per_sentence[i].comet = comet.scores[i];
      result.comet_mean = comet.mean;
      result.comet_checkpoint = comet.checkpoint;
    } catch (const Error& e) {
      result.comet_error = e.what();
      log::warn(std::string("COMET unavailable for ") + in.lang_pair.str() + " / " +
                result.label + ": " + e.what());
    }
  }
  return result;
}

ExperimentRunner::ExperimentRunner(ExperimentConfig config, std::shared_ptr<ChatBackend> backend,
                                   RetrieverFactory factory)
    : config_(std::move(config)), backend_(std::move(backend)), factory_(std::move(factory)) {
  if (!backend_) backend_ = make_backend(config_.backend_type, config_.backend);
  if (!factory_) {
    const auto mode = config_.retrieval_mode;
    factory_ = [mode](const ParallelCorpus& dselect, const LangPair& lp) {
      return std::make_unique<TfidfRetriever>(
          std::make_shared<const RetrievalIndex>(build_index(dselect, lp.source)), mode);
    };
  }
  if (config_.scorer) scorer_.emplace(*config_.scorer);
}

const ExperimentRunner::LoadedPair& ExperimentRunner::corpora(const LangPair& lp) {
  const auto key = lp.str();
  if (auto it = loaded_.find(key); it != loaded_.end()) return it->second;
  const auto src = config_.corpora.find(key);
  if (src == config_.corpora.end()) throw ConfigError("no corpus configured for " + key);
  const auto& c = src->second;
  LoadedPair loaded{
      c.train_tsv.empty() ? load_parallel_corpus(c.train_src, c.train_tgt, lp)
                          : load_tsv_corpus(c.train_tsv, lp),
      c.test_tsv.empty() ? load_parallel_corpus(c.test_src, c.test_tgt, lp)
                         : load_tsv_corpus(c.test_tsv, lp),
  };
  log::info("loaded " + key + ": " + std::to_string(loaded.train.size()) + " training pairs, " +
            std::to_string(loaded.test.size()) + " test pairs");
  return loaded_.emplace(key, std::move(loaded)).first->second;
}

ScenarioResult ExperimentRunner::run_cell(const LangPair& lp, const Scenario& scenario,
                                          std::size_t pool_size, std::string label) {
  const auto& data = corpora(lp);
  const auto split =
      split_dataset(data.train, pool_size, data.test, config_.test_size, config_.pool_sample_seed);

  std::unique_ptr<DemonstrationRetriever> retriever;
  if (scenario.kind == ScenarioKind::kRetrieveK) retriever = factory_(split.dselect, lp);

  CellInputs in{lp,
                &split.dselect,
                &split.test_set,
                retriever.get(),
                backend_.get(),
                scorer_ ? &*scorer_ : nullptr,
                config_.backend.max_in_flight};
  log::info("running " + lp.str() + " / " + label);
  auto result = icl::run_scenario(in, scenario);
  result.label = std::move(label);
  return result;
}

ScenarioResult ExperimentRunner::run_scenario(const LangPair& lp, const Scenario& scenario) {
  return run_cell(lp, scenario, config_.pool_size, std::string(scenario_label(scenario.kind)));
}

namespace {

ScenarioResult failed_cell(const LangPair& lp, const Scenario& scenario, std::size_t pool_size,
                           std::string label, const std::exception& e) {
  ScenarioResult r;
  r.lang_pair = lp;
  r.scenario = scenario;
  r.label = std::move(label);
  r.pool_size = pool_size;
  r.ok = false;
  r.error = e.what();
  return r;
}

}  // namespace

void ExperimentRunner::persist(const ExperimentReport& report) const {
  if (config_.output_path.empty()) return;
  {
    std::ofstream out(config_.output_path, std::ios::binary);
    if (!out) throw IoError("cannot write report to " + config_.output_path.string());
    out << report_to_json(report) << '\n';
  }
  if (!config_.table_path.empty()) {
    std::ofstream out(config_.table_path, std::ios::binary);
    if (!out) throw IoError("cannot write table to " + config_.table_path.string());
    out << render_table(report);
  }
}

ExperimentReport ExperimentRunner::run_experiment() {
  ExperimentReport report;
  report.config_json = config_snapshot_json(config_);
  report.backend_model = backend_->model_name();
  report.started_at = utc_now();
  for (const auto& lp : config_.lang_pairs) {
    for (auto kind : config_.scenarios) {
      const auto scenario = config_.scenario(kind);
      const std::string label(scenario_label(kind));
      try {
        report.results.push_back(run_cell(lp, scenario, config_.pool_size, label));
      } catch (const std::exception& e) {
        report.results.push_back(failed_cell(lp, scenario, config_.pool_size, label, e));
      }
      if (!report.results.back().ok) {
        log::error(lp.str() + " / " + label + " failed: " + report.results.back().error);
      }
      report.finished_at = utc_now();
      persist(report);
    }
  }
  report.finished_at = utc_now();
  persist(report);
  return report;
}

ExperimentReport ExperimentRunner::run_size_ablation(std::span<const std::size_t> sizes) {
  ExperimentReport report;
  report.kind = "ablation";
  report.config_json = config_snapshot_json(config_);
  report.backend_model = backend_->model_name();
  report.started_at = utc_now();
  const auto scenario = config_.scenario(ScenarioKind::kRetrieveK);
  for (const auto& lp : config_.lang_pairs) {
    for (auto size : sizes) {
      auto label = "Retrieve ICL Dselect=" + std::to_string(size);
      try {
        report.results.push_back(run_cell(lp, scenario, size, label));
      } catch (const std::exception& e) {
        report.results.push_back(failed_cell(lp, scenario, size, label, e));
      }
      if (!report.results.back().ok) {
        log::error(lp.str() + " / " + label + " failed: " + report.results.back().error);
      }
      report.finished_at = utc_now();
      persist(report);
    }
  }
  report.finished_at = utc_now();
  if (!sizes.empty()) persist(report);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  return ExperimentRunner(config).run_experiment();
}

ExperimentReport run_size_ablation(const ExperimentConfig& config, std::span<const std::size_t> sizes) {
  return ExperimentRunner(config).run_size_ablation(sizes);
}

namespace {

json bleu_json(const BleuScore& b) {
  return {{"score", b.score},
          {"precisions", b.precisions},
          {"brevity_penalty", b.brevity_penalty},
          {"hyp_length", b.hyp_length},
          {"ref_length", b.ref_length},
          {"zero_precision", b.zero_precision}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json doc;
  doc["format"] = "icl-mt-report/1";
  doc["kind"] = report.kind;
  doc["config"] = json::parse(report.config_json.empty() ? "{}" : report.config_json);
  doc["backend_model"] = report.backend_model;
  doc["timestamps"] = {{"started", report.started_at}, {"finished", report.finished_at}};
  doc["results"] = json::array();
  for (const auto& r : report.results) {
    json cell;
    cell["lang_pair"] = r.lang_pair.str();
    cell["scenario"] = {{"kind", to_string(r.scenario.kind)},
                        {"k", r.scenario.k},
                        {"seed", r.scenario.seed}};
    cell["label"] = r.label;
    cell["pool_size"] = r.pool_size;
    cell["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
      cell["error"] = r.error;
      cell["failed_sentence"] = r.failed_sentence ? json(*r.failed_sentence) : json(nullptr);
    } else {
      cell["bleu"] = bleu_json(r.bleu);
    }
    cell["comet_mean"] = optional_json(r.comet_mean);
    if (!r.comet_checkpoint.empty()) cell["comet_checkpoint"] = r.comet_checkpoint;
    if (!r.comet_error.empty()) cell["comet_error"] = r.comet_error;
    cell["per_sentence"] = json::array();
    for (const auto& s : r.per_sentence) {
      cell["per_sentence"].push_back({{"index", s.index},
                                      {"source", s.source},
                                      {"hypothesis", s.hypothesis},
                                      {"reference", s.reference},
                                      {"retrieved_indices", s.retrieved_indices},
                                      {"scores", s.scores},
                                      {"comet", optional_json(s.comet)}});
    }
    doc["results"].push_back(std::move(cell));
  }
  return doc.dump(2);
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string render_table(const ExperimentReport& report) {
  std::size_t width = std::string("Evaluation Matrix").size();
  for (const auto& r : report.results) width = std::max(width, r.label.size());
  width += 2;

  std::string out = pad("Evaluation Matrix", width) + pad("COMET", 8) + "BLEU\n";
  std::string current;
  for (const auto& r : report.results) {
    const auto name = upper(r.lang_pair.str());
    if (name != current) {
      out += name + '\n';
      current = name;
    }
    out += pad(r.label, width);
    if (!r.ok) {
      out += "FAILED\n";
      continue;
    }
    out += pad(r.comet_mean ? fixed4(*r.comet_mean) : "-", 8) + fixed4(r.bleu.score) + '\n';
  }
  return out;
}

}  // namespace icl
