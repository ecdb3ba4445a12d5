#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "icl/corpus.hpp"
#include "icl/random.hpp"

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("icl-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) { return icl::read_file(path); }

// Zipf-ish word draws so that common words appear in many documents and rare ones in few.
inline std::string random_sentence(icl::Rng& rng, std::size_t vocab, std::size_t min_len,
                                   std::size_t max_len, const std::string& prefix = "w") {
  const auto len = min_len + icl::uniform_below(rng, max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    const auto a = icl::uniform_below(rng, vocab) + 1;
    const auto b = icl::uniform_below(rng, a) ;
    if (i) s += ' ';
    s += prefix + std::to_string(b);
  }
  return s;
}

// English-like synthetic pool: sources over "w<i>" words, targets over "t<i>" words.
inline icl::ParallelCorpus synthetic_corpus(std::size_t n, std::uint64_t seed,
                                            std::size_t vocab = 300,
                                            const icl::LangPair& lp = {"de", "en"}) {
  icl::Rng rng(seed);
  std::vector<icl::SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back({random_sentence(rng, vocab, 3, 12, "w"), random_sentence(rng, vocab, 4, 12, "t"), i});
  }
  return icl::ParallelCorpus(lp, std::move(pairs));
}

}  // namespace fixtures
