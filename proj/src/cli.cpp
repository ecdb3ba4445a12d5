#include "icl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "icl/comet.hpp"
#include "icl/corpus.hpp"
#include "icl/error.hpp"
#include "icl/experiment.hpp"
#include "icl/log.hpp"
#include "icl/metrics.hpp"
#include "icl/random.hpp"
#include "icl/prompting.hpp"
#include "icl/retriever.hpp"

namespace icl {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
  const auto text = read_file(path);
  std::vector<std::string> out;
  for (auto line : split_lines(text)) out.emplace_back(line);
  return out;
}

struct BuildIndexArgs {
  std::string src, tgt, tsv, lang_pair, out, lang;
  std::optional<std::size_t> pool_size;
  std::optional<std::uint64_t> sample_seed;
};

int cmd_build_index(const BuildIndexArgs& a, std::ostream& out, bool as_json) {
  const auto lp = LangPair::parse(a.lang_pair);
  if (a.tsv.empty() && (a.src.empty() || a.tgt.empty())) {
    throw CLI::ValidationError("build-index", "needs --src and --tgt, or --tsv");
  }
  const auto corpus = a.tsv.empty() ? load_parallel_corpus(a.src, a.tgt, lp) : load_tsv_corpus(a.tsv, lp);
  const auto pool = split_dataset(corpus, a.pool_size.value_or(corpus.size()), corpus, 0, a.sample_seed).dselect;
  const auto index = build_index(pool, a.lang.empty() ? lp.source : a.lang);
  save_index(index, a.out);
  if (as_json) {
    out << json{{"index", a.out},
                {"pairs", index.size()},
                {"vocabulary", index.model().vocabulary_size()},
                {"nonzeros", index.doc_vectors().nonZeros()}}
               .dump()
        << '\n';
  } else {
    log::info("wrote " + a.out + ": " + std::to_string(index.size()) + " pairs, " +
              std::to_string(index.model().vocabulary_size()) + " terms");
  }
  return 0;
}

struct RetrieveArgs {
  std::string index, prompt, mode = "corpus-fit";
  std::size_t k = 4;
};

int cmd_retrieve(const RetrieveArgs& a, std::ostream& out, bool as_json) {
  const auto index = load_index(a.index);
  const auto hits = retrieve_top_k(index, a.prompt, a.k, parse_retrieval_mode(a.mode));
  if (as_json) {
    auto doc = json::array();
    for (std::size_t r = 0; r < hits.size(); ++r) {
      doc.push_back({{"rank", r + 1},
                     {"score", hits[r].score},
                     {"pair_index", hits[r].pair_index},
                     {"source", hits[r].pair.source_text},
                     {"target", hits[r].pair.target_text}});
    }
    out << doc.dump() << '\n';
    return 0;
  }
  for (std::size_t r = 0; r < hits.size(); ++r) {
    out << (r + 1) << '\t' << fixed(hits[r].score, 6) << '\t' << hits[r].pair.source_text << '\t'
        << hits[r].pair.target_text << '\n';
  }
  return 0;
}

struct TranslateArgs {
  std::string index, scenario = "retrieve", input, backend_config, mode = "corpus-fit", dump_prompts;
  std::size_t k = 4;
};

int cmd_translate(const TranslateArgs& a, std::uint64_t seed, std::ostream& out, bool as_json) {
  BackendConfig backend_cfg;
  const auto type = parse_backend_config(read_file(a.backend_config), backend_cfg);
  auto backend = make_backend(type, backend_cfg);

  const auto kind = parse_scenario_kind(a.scenario);
  const auto index = std::make_shared<const RetrievalIndex>(load_index(a.index));
  const Scenario scenario = kind == ScenarioKind::kZeroShot  ? Scenario::zero_shot()
                            : kind == ScenarioKind::kRandomK ? Scenario::random_k(a.k, seed)
                                                             : Scenario::retrieve_k(a.k);
  TfidfRetriever retriever(index, parse_retrieval_mode(a.mode));
  const auto& lp = index->pairs().lang_pair();

  auto dump = json::array();
  auto results = json::array();
  const auto inputs = read_lines(a.input);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<SentencePair> examples;
    std::vector<std::size_t> used;
    if (kind == ScenarioKind::kRandomK) {
      examples = select_random_examples(index->pairs(), a.k, derive_seed(seed, i));
    } else if (kind == ScenarioKind::kRetrieveK) {
      for (auto& hit : retriever.retrieve(inputs[i], a.k)) examples.push_back(std::move(hit.pair));
    }
    for (const auto& e : examples) used.push_back(e.index);
    const auto messages = build_messages(scenario, inputs[i], examples, lp);
    if (!a.dump_prompts.empty()) dump.push_back(json::parse(messages_to_json(messages, -1)));
    const auto reply = backend->complete(messages);
    if (as_json) {
      results.push_back({{"index", i}, {"source", inputs[i]}, {"translation", reply.text}, {"examples", used}});
    } else {
      out << reply.text << '\n';
    }
  }
  if (as_json) out << results.dump() << '\n';
  if (!a.dump_prompts.empty()) {
    std::ofstream f(a.dump_prompts, std::ios::binary);
    if (!f) throw IoError("cannot write " + a.dump_prompts);
    f << dump.dump(2) << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  std::string hyp, ref, src, scorer, lang = "en";
  bool sentence_mean = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, bool as_json) {
  const auto hyps = read_lines(a.hyp);
  const auto refs = read_lines(a.ref);
  const auto bleu = corpus_bleu(hyps, refs, a.lang);
  json doc{{"bleu", bleu.score},
           {"precisions", bleu.precisions},
           {"brevity_penalty", bleu.brevity_penalty},
           {"hyp_length", bleu.hyp_length},
           {"ref_length", bleu.ref_length},
           {"zero_precision", bleu.zero_precision}};
  std::optional<double> sentence_mean;
  if (a.sentence_mean) {
    std::vector<TokenSeq> h, r;
    for (const auto& s : hyps) h.push_back(tokenize(s, a.lang));
    for (const auto& s : refs) r.push_back(tokenize(s, a.lang));
    sentence_mean = mean_sentence_bleu(h, r);
    doc["sentence_bleu_mean"] = *sentence_mean;
  }

  std::optional<CometResult> comet;
  if (!a.scorer.empty()) {
    if (a.src.empty()) throw CLI::ValidationError("evaluate", "--scorer needs --src");
    const auto srcs = read_lines(a.src);
    if (srcs.size() != hyps.size()) throw LengthMismatch(hyps.size(), srcs.size());
    std::vector<CometRecord> records;
    for (std::size_t i = 0; i < hyps.size(); ++i) records.push_back({srcs[i], hyps[i], refs[i]});
    try {
      comet = CometScorer(a.scorer).score(records);
    } catch (const Error& e) {
      log::warn(std::string(e.what()) + "; reporting BLEU only");
    }
  }
  doc["comet"] = comet ? json(comet->mean) : json(nullptr);
  if (comet) doc["comet_scores"] = comet->scores;
  if (comet && !comet->checkpoint.empty()) doc["comet_checkpoint"] = comet->checkpoint;

  if (as_json) {
    out << doc.dump() << '\n';
    return 0;
  }
  out << "BLEU: " << fixed(bleu.score, 4) << '\n';
  if (sentence_mean) out << "Sentence-BLEU mean: " << fixed(*sentence_mean, 4) << '\n';
  if (comet) out << "COMET: " << fixed(comet->mean, 4) << '\n';
  return 0;
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& raw) {
  std::vector<std::size_t> sizes;
  for (const auto& item : raw) {
    std::size_t start = 0;
    while (start < item.size()) {
      auto end = item.find(',', start);
      if (end == std::string::npos) end = item.size();
      const auto token = item.substr(start, end - start);
      if (!token.empty()) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
          v = std::stoull(token, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != token.size()) throw CLI::ValidationError("--sizes", "not a count: " + token);
        sizes.push_back(static_cast<std::size_t>(v));
      }
      start = end + 1;
    }
  }
  return sizes;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"In-context-learning machine translation toolkit: TF-IDF demonstration retrieval, "
               "few-shot prompting, BLEU/COMET evaluation",
               "icl-mt"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  bool seed_given = false;
  bool as_json = false;
  bool verbose = false;
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { seed = v; seed_given = true; },
                                         "Seed for every random choice");
  app.add_flag("--json", as_json, "Emit one JSON document on stdout");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  BuildIndexArgs build;
  auto* build_cmd = app.add_subcommand("build-index", "Build a retrieval index over a demonstration pool");
  build_cmd->add_option("--src", build.src, "Source-side file (one sentence per line)");
  build_cmd->add_option("--tgt", build.tgt, "Target-side file (line-aligned with --src)");
  build_cmd->add_option("--tsv", build.tsv, "Single source<TAB>target file instead of --src/--tgt");
  build_cmd->add_option("--lang-pair", build.lang_pair, "e.g. zh-en")->required();
  build_cmd->add_option("--pool-size", build.pool_size, "Use the first N pairs (default: all)");
  build_cmd->add_option("--sample-seed", build.sample_seed, "Sample the pool with this seed instead of taking a prefix");
  build_cmd->add_option("--lang", build.lang, "Tokenizer language (default: source language)");
  build_cmd->add_option("--out", build.out, "Index file to write")->required();

  RetrieveArgs retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Top-k demonstrations for a prompt");
  retrieve_cmd->add_option("--index", retrieve.index)->required();
  retrieve_cmd->add_option("--prompt", retrieve.prompt)->required();
  retrieve_cmd->add_option("--k", retrieve.k, "Number of demonstrations")->capture_default_str();
  retrieve_cmd->add_option("--mode", retrieve.mode, "corpus-fit or refit")
      ->check(CLI::IsMember({"corpus-fit", "refit"}))
      ->capture_default_str();

  TranslateArgs translate;
  auto* translate_cmd = app.add_subcommand("translate", "Translate a file of source sentences");
  translate_cmd->add_option("--index", translate.index, "Index holding the demonstration pool")->required();
  translate_cmd->add_option("--scenario", translate.scenario)
      ->check(CLI::IsMember({"none", "random", "retrieve"}))
      ->capture_default_str();
  translate_cmd->add_option("--k", translate.k)->capture_default_str();
  translate_cmd->add_option("--input", translate.input, "One source sentence per line")->required();
  translate_cmd->add_option("--backend-config", translate.backend_config, "Flat JSON with backend.* keys")->required();
  translate_cmd->add_option("--mode", translate.mode)->check(CLI::IsMember({"corpus-fit", "refit"}))->capture_default_str();
  translate_cmd->add_option("--dump-prompts", translate.dump_prompts, "Write every message sequence as JSON");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score hypotheses against references");
  evaluate_cmd->add_option("--hyp", evaluate.hyp)->required();
  evaluate_cmd->add_option("--ref", evaluate.ref)->required();
  evaluate_cmd->add_option("--src", evaluate.src, "Sources (needed for COMET)");
  evaluate_cmd->add_option("--scorer", evaluate.scorer, "COMET scorer URL or command");
  evaluate_cmd->add_option("--lang", evaluate.lang, "Tokenizer language for BLEU")->capture_default_str();
  evaluate_cmd->add_flag("--sentence-mean", evaluate.sentence_mean, "Also report the mean of smoothed sentence BLEU");

  std::string experiment_config;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run every language pair x scenario cell");
  experiment_cmd->add_option("--config", experiment_config)->required();

  std::string ablation_config;
  std::vector<std::string> ablation_sizes;
  auto* ablation_cmd = app.add_subcommand("ablation", "Retrieve scenario across pool sizes");
  ablation_cmd->add_option("--config", ablation_config)->required();
  ablation_cmd->add_option("--sizes", ablation_sizes, "Pool sizes, e.g. 10000,1000000")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  auto previous_sink = log::set_sink([&err](log::Level, std::string_view msg) { err << msg << '\n'; });
  log::set_min_level(verbose ? log::Level::kDebug : log::Level::kInfo);
  struct RestoreSink {
    log::Sink sink;
    ~RestoreSink() { log::set_sink(std::move(sink)); }
  } restore{std::move(previous_sink)};

  try {
    if (*build_cmd) return cmd_build_index(build, out, as_json);
    if (*retrieve_cmd) return cmd_retrieve(retrieve, out, as_json);
    if (*translate_cmd) return cmd_translate(translate, seed, out, as_json);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, out, as_json);
    if (*experiment_cmd || *ablation_cmd) {
      auto cfg = load_experiment_config(*experiment_cmd ? experiment_config : ablation_config);
      if (seed_given) cfg.seed = seed;
      ExperimentRunner runner(cfg);
      const auto report = *experiment_cmd ? runner.run_experiment()
                                          : runner.run_size_ablation(parse_sizes(ablation_sizes));
      if (as_json) {
        out << report_to_json(report) << '\n';
      } else {
        out << render_table(report);
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << log::redact(e.what()) << '\n';
    return 2;
  }
  return 1;
}

}  // namespace icl
