#include <json.hpp>

#include "icl/error.hpp"
#include "icl/experiment.hpp"

namespace icl {

using nlohmann::json;

namespace {

json parse_flat(std::string_view text) {
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("expected a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) throw ConfigError("nested value under '" + key + "'; keys must be flat");
  }
  return doc;
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T>
T get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  if constexpr (std::is_unsigned_v<T>) {
    if (v.is_number_float() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError("'" + key + "' must be a nonnegative integer");
    }
  }
  return v.get<T>();
}

// Lists are either JSON arrays of strings or comma-separated strings.
std::vector<std::string> get_list(const json& v, const std::string& key) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(get_string(item, key));
    return out;
  }
  const auto s = get_string(v, key);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    auto item = s.substr(start, end - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

// Applies one backend.* key; returns false for keys outside the backend namespace.
bool apply_backend_key(const std::string& key, const json& value, std::string& type,
                       BackendConfig& b, std::string& key_env) {
  if (!key.starts_with("backend.")) return false;
  const auto field = key.substr(8);
  if (field == "type") type = get_string(value, key);
  else if (field == "endpoint") b.endpoint_url = get_string(value, key);
  else if (field == "model") b.model_name = get_string(value, key);
  else if (field == "api_key") b.api_key = get_string(value, key);
  else if (field == "api_key_env") key_env = get_string(value, key);
  else if (field == "timeout") b.timeout_seconds = get_number<double>(value, key);
  else if (field == "max_retries") b.max_retries = get_number<std::size_t>(value, key);
  else if (field == "temperature") b.temperature = get_number<double>(value, key);
  else if (field == "max_in_flight") b.max_in_flight = get_number<std::size_t>(value, key);
  else if (field == "backoff_base") b.backoff_base_seconds = get_number<double>(value, key);
  else throw ConfigError("unknown key '" + key + "'");
  return true;
}

void finish_backend(std::string& type, BackendConfig& b, const std::string& key_env) {
  if (b.api_key.empty()) b.api_key = api_key_from_env(key_env);
  if (type != "http" && type != "mock" && type != "echo") {
    throw ConfigError("backend.type must be http, mock or echo");
  }
  b.validate();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (test_size < 1) throw ConfigError("test_size must be >= 1");
  if (lang_pairs.empty()) throw ConfigError("lang_pairs is empty");
  for (const auto& lp : lang_pairs) {
    const auto it = corpora.find(lp.str());
    if (it == corpora.end()) throw ConfigError("no corpus.* paths for " + lp.str());
    const auto& c = it->second;
    if (c.train_tsv.empty() && (c.train_src.empty() || c.train_tgt.empty())) {
      throw ConfigError("corpus." + lp.str() + " needs train_src/train_tgt or train_tsv");
    }
    if (c.test_tsv.empty() && (c.test_src.empty() || c.test_tgt.empty())) {
      throw ConfigError("corpus." + lp.str() + " needs test_src/test_tgt or test_tsv");
    }
  }
  backend.validate();
}

Scenario ExperimentConfig::scenario(ScenarioKind kind) const {
  switch (kind) {
    case ScenarioKind::kZeroShot: return Scenario::zero_shot();
    case ScenarioKind::kRandomK: return Scenario::random_k(k, seed);
    case ScenarioKind::kRetrieveK: return Scenario::retrieve_k(k);
  }
  return {};
}

std::string parse_backend_config(std::string_view json_text, BackendConfig& out) {
  const auto doc = parse_flat(json_text);
  std::string type = "http";
  std::string key_env(kApiKeyEnv);
  for (const auto& [key, value] : doc.items()) apply_backend_key(key, value, type, out, key_env);
  finish_backend(type, out, key_env);
  return type;
}

ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir) {
  const auto doc = parse_flat(json_text);
  ExperimentConfig cfg;
  std::string key_env(kApiKeyEnv);

  for (const auto& [key, value] : doc.items()) {
    if (apply_backend_key(key, value, cfg.backend_type, cfg.backend, key_env)) continue;
    if (key == "lang_pairs") {
      for (const auto& lp : get_list(value, key)) cfg.lang_pairs.push_back(LangPair::parse(lp));
    } else if (key == "scenarios") {
      cfg.scenarios.clear();
      for (const auto& s : get_list(value, key)) cfg.scenarios.push_back(parse_scenario_kind(s));
    } else if (key == "k") {
      cfg.k = get_number<std::size_t>(value, key);
    } else if (key == "pool_size") {
      cfg.pool_size = get_number<std::size_t>(value, key);
    } else if (key == "test_size") {
      cfg.test_size = get_number<std::size_t>(value, key);
    } else if (key == "retrieval_mode") {
      cfg.retrieval_mode = parse_retrieval_mode(get_string(value, key));
    } else if (key == "seed") {
      cfg.seed = get_number<std::uint64_t>(value, key);
    } else if (key == "pool_sample_seed") {
      cfg.pool_sample_seed = get_number<std::uint64_t>(value, key);
    } else if (key == "scorer") {
      if (!value.is_null()) cfg.scorer = get_string(value, key);
    } else if (key == "output") {
      cfg.output_path = resolve(base_dir, get_string(value, key));
    } else if (key == "table_output") {
      cfg.table_path = resolve(base_dir, get_string(value, key));
    } else if (key.starts_with("corpus.")) {
      const auto dot = key.rfind('.');
      if (dot <= 7) throw ConfigError("corpus keys look like corpus.<src>-<tgt>.<field>: " + key);
      const auto pair = LangPair::parse(key.substr(7, dot - 7)).str();
      const auto field = key.substr(dot + 1);
      auto& c = cfg.corpora[pair];
      const auto path = resolve(base_dir, get_string(value, key));
      if (field == "train_src") c.train_src = path;
      else if (field == "train_tgt") c.train_tgt = path;
      else if (field == "train_tsv") c.train_tsv = path;
      else if (field == "test_src") c.test_src = path;
      else if (field == "test_tgt") c.test_tgt = path;
      else if (field == "test_tsv") c.test_tsv = path;
      else throw ConfigError("unknown key '" + key + "'");
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  finish_backend(cfg.backend_type, cfg.backend, key_env);
  if (cfg.table_path.empty() && !cfg.output_path.empty()) {
    cfg.table_path = std::filesystem::path(cfg.output_path).replace_extension(".txt");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

std::string config_snapshot_json(const ExperimentConfig& c) {
  json doc;
  doc["lang_pairs"] = json::array();
  for (const auto& lp : c.lang_pairs) doc["lang_pairs"].push_back(lp.str());
  doc["scenarios"] = json::array();
  for (auto s : c.scenarios) doc["scenarios"].push_back(to_string(s));
  doc["k"] = c.k;
  doc["pool_size"] = c.pool_size;
  doc["test_size"] = c.test_size;
  doc["retrieval_mode"] = to_string(c.retrieval_mode);
  doc["seed"] = c.seed;
  doc["pool_sample_seed"] = c.pool_sample_seed ? json(*c.pool_sample_seed) : json(nullptr);
  doc["scorer"] = c.scorer ? json(*c.scorer) : json(nullptr);
  doc["backend"] = {{"type", c.backend_type},
                    {"endpoint", c.backend.endpoint_url},
                    {"model", c.backend.model_name},
                    {"temperature", c.backend.temperature},
                    {"timeout", c.backend.timeout_seconds},
                    {"max_retries", c.backend.max_retries},
                    {"max_in_flight", c.backend.max_in_flight}};
  json corpora = json::object();
  for (const auto& [pair, src] : c.corpora) {
    json entry = json::object();
    const auto put = [&entry](const char* name, const std::filesystem::path& p) {
      if (!p.empty()) entry[name] = p.string();
    };
    put("train_src", src.train_src);
    put("train_tgt", src.train_tgt);
    put("train_tsv", src.train_tsv);
    put("test_src", src.test_src);
    put("test_tgt", src.test_tgt);
    put("test_tsv", src.test_tsv);
    corpora[pair] = entry;
  }
  doc["corpora"] = corpora;
  return doc.dump();
}

}  // namespace icl
