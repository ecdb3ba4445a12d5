#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icl {

/// Source/target language codes, e.g. zh-en. Codes are lowercase ISO 639 (2 or 3 letters).
struct LangPair {
  std::string source;
  std::string target;

  LangPair() = default;
  /// Throws InvalidLangPair on malformed or identical codes.
  LangPair(std::string source, std::string target);

  /// Parses "zh-en" (also accepts '_' as separator).
  static LangPair parse(std::string_view text);
  std::string str() const { return source + "-" + target; }

  friend bool operator==(const LangPair&, const LangPair&) = default;
};

bool is_valid_language_code(std::string_view code);

struct SentencePair {
  std::string source_text;
  std::string target_text;
  std::size_t index = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

/// Ordered pairs whose indices are exactly 0..size()-1. Immutable once built.
class ParallelCorpus {
 public:
  ParallelCorpus() = default;
  /// Re-numbers the pairs 0..n-1 in the given order.
  ParallelCorpus(LangPair lang_pair, std::vector<SentencePair> pairs);

  const LangPair& lang_pair() const { return lang_pair_; }
  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  /// The first n pairs. Throws SizeExceedsCorpus when n > size().
  ParallelCorpus prefix(std::size_t n) const;

 private:
  LangPair lang_pair_;
  std::vector<SentencePair> pairs_;
};

/// Two line-aligned UTF-8 files, one sentence per line.
ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path,
                                    const LangPair& lang_pair);

/// One `source<TAB>target` record per line.
ParallelCorpus load_tsv_corpus(const std::filesystem::path& path, const LangPair& lang_pair);

// In-memory variants of the loaders; the file versions delegate to these.
ParallelCorpus parse_parallel_corpus(std::string_view source_text, std::string_view target_text,
                                     const LangPair& lang_pair);
ParallelCorpus parse_tsv_corpus(std::string_view text, const LangPair& lang_pair);

void write_parallel_corpus(const ParallelCorpus& corpus,
                           const std::filesystem::path& source_path,
                           const std::filesystem::path& target_path);

struct DatasetSplit {
  ParallelCorpus dselect;
  ParallelCorpus test_set;
};

/// Demonstration pool = first pool_size training pairs, test set = first test_size test pairs.
/// With sample_seed, the pool is instead a seeded uniform sample of pool_size training pairs
/// (kept in corpus order and re-numbered); the test set is always a prefix.
DatasetSplit split_dataset(const ParallelCorpus& corpus, std::size_t pool_size,
                           const ParallelCorpus& test_corpus, std::size_t test_size,
                           std::optional<std::uint64_t> sample_seed = std::nullopt);

/// Splits on '\n'; a trailing '\r' belongs to the terminator. A final newline does not
/// start a new line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);

}  // namespace icl
