#include "icl/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "icl/error.hpp"
#include "icl/random.hpp"
#include "icl/unicode.hpp"

namespace icl {

bool is_valid_language_code(std::string_view code) {
  if (code.size() < 2 || code.size() > 3) return false;
  return std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

LangPair::LangPair(std::string source, std::string target)
    : source(std::move(source)), target(std::move(target)) {
  if (!is_valid_language_code(this->source) || !is_valid_language_code(this->target)) {
    throw InvalidLangPair(this->source + "-" + this->target);
  }
  if (this->source == this->target) {
    throw InvalidLangPair(this->source + "-" + this->target + " (source equals target)");
  }
}

LangPair LangPair::parse(std::string_view text) {
  const auto sep = text.find_first_of("-_");
  if (sep == std::string_view::npos) throw InvalidLangPair(std::string(text));
  return LangPair(std::string(text.substr(0, sep)), std::string(text.substr(sep + 1)));
}

ParallelCorpus::ParallelCorpus(LangPair lang_pair, std::vector<SentencePair> pairs)
    : lang_pair_(std::move(lang_pair)), pairs_(std::move(pairs)) {
  for (std::size_t i = 0; i < pairs_.size(); ++i) pairs_[i].index = i;
}

ParallelCorpus ParallelCorpus::prefix(std::size_t n) const {
  if (n > pairs_.size()) throw SizeExceedsCorpus(n, pairs_.size());
  return ParallelCorpus(lang_pair_, {pairs_.begin(), pairs_.begin() + static_cast<long>(n)});
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

namespace {

std::string checked_segment(std::string_view segment, std::size_t line_no) {
  if (!is_valid_utf8(segment)) throw InvalidUtf8(line_no);
  if (segment.empty()) throw EmptySegment(line_no);
  return std::string(segment);
}

}  // namespace

ParallelCorpus parse_parallel_corpus(std::string_view source_text, std::string_view target_text,
                                     const LangPair& lang_pair) {
  const auto src = split_lines(source_text);
  const auto tgt = split_lines(target_text);
  if (src.size() != tgt.size()) throw LineCountMismatch(src.size(), tgt.size());

  std::vector<SentencePair> pairs;
  pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    pairs.push_back({checked_segment(src[i], i + 1), checked_segment(tgt[i], i + 1), i});
  }
  return ParallelCorpus(lang_pair, std::move(pairs));
}

ParallelCorpus parse_tsv_corpus(std::string_view text, const LangPair& lang_pair) {
  const auto lines = split_lines(text);
  std::vector<SentencePair> pairs;
  pairs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (std::count(line.begin(), line.end(), '\t') != 1) throw MalformedLine(i + 1);
    const auto tab = line.find('\t');
    pairs.push_back({checked_segment(line.substr(0, tab), i + 1),
                     checked_segment(line.substr(tab + 1), i + 1), i});
  }
  return ParallelCorpus(lang_pair, std::move(pairs));
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path,
                                    const LangPair& lang_pair) {
  return parse_parallel_corpus(read_file(source_path), read_file(target_path), lang_pair);
}

ParallelCorpus load_tsv_corpus(const std::filesystem::path& path, const LangPair& lang_pair) {
  return parse_tsv_corpus(read_file(path), lang_pair);
}

void write_parallel_corpus(const ParallelCorpus& corpus,
                           const std::filesystem::path& source_path,
                           const std::filesystem::path& target_path) {
  std::ofstream src(source_path, std::ios::binary);
  std::ofstream tgt(target_path, std::ios::binary);
  if (!src || !tgt) throw IoError("cannot write corpus to " + source_path.string());
  for (const auto& p : corpus) {
    src << p.source_text << '\n';
    tgt << p.target_text << '\n';
  }
}

DatasetSplit split_dataset(const ParallelCorpus& corpus, std::size_t pool_size,
                           const ParallelCorpus& test_corpus, std::size_t test_size,
                           std::optional<std::uint64_t> sample_seed) {
  if (pool_size > corpus.size()) throw SizeExceedsCorpus(pool_size, corpus.size());
  if (test_size > test_corpus.size()) throw SizeExceedsCorpus(test_size, test_corpus.size());

  DatasetSplit split{corpus.prefix(pool_size), test_corpus.prefix(test_size)};
  if (sample_seed) {
    Rng rng(*sample_seed);
    auto picked = sample_without_replacement(rng, corpus.size(), pool_size);
    std::sort(picked.begin(), picked.end());
    std::vector<SentencePair> pairs;
    pairs.reserve(picked.size());
    for (auto i : picked) pairs.push_back(corpus[i]);
    split.dselect = ParallelCorpus(corpus.lang_pair(), std::move(pairs));
  }
  return split;
}

}  // namespace icl
