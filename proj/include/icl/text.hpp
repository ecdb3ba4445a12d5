#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace icl {

/// One row of a TF-IDF matrix: only strictly positive weights are stored, indices ascending.
template <typename Scalar>
using SparseVectorT = Eigen::SparseVector<Scalar>;
using SparseVector = SparseVectorT<double>;

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string lang;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// True for languages tokenized into character bigrams (zh, ja).
bool uses_character_bigrams(std::string_view lang);

/// Whitespace languages: lowercase, split on Unicode whitespace, strip leading and trailing
/// punctuation per token. zh/ja: lowercase, overlapping code-point bigrams over each run of
/// non-space, non-punctuation characters (a single-character run yields itself).
TokenSeq tokenize(std::string_view text, std::string_view lang);

/// count(term, doc) / |doc|. Throws EmptyDocument for an empty doc.
double tf(std::string_view term, const TokenSeq& doc);

/// Vocabulary, document frequencies and natural-log IDF weights for a document collection.
///
/// Terms are indexed densely in first-occurrence order. idf(i) = ln(num_docs / doc_freq(i)),
/// with no smoothing; every vocabulary term has doc_freq >= 1 by construction.
class TfidfModel {
 public:
  TfidfModel() = default;
  /// Rebuilds a model from persisted state; idf is recomputed. Throws IndexFormatError
  /// if the state violates 1 <= df <= num_docs or repeats a term.
  TfidfModel(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq,
             std::uint64_t num_docs);

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::uint64_t num_docs() const { return num_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint64_t>& doc_freq() const { return doc_freq_; }
  const std::vector<double>& idf_weights() const { return idf_; }

  /// Term index, or -1 when out of vocabulary.
  std::int64_t find(std::string_view term) const;

  friend TfidfModel fit_tfidf(std::span<const TokenSeq> docs);

 private:
  void compute_idf();

  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> vocabulary_;
  std::vector<std::uint64_t> doc_freq_;
  std::uint64_t num_docs_ = 0;
  std::vector<double> idf_;
};

/// Throws EmptyCollection if docs is empty or every doc is empty.
TfidfModel fit_tfidf(std::span<const TokenSeq> docs);

/// ln(N / df) for vocabulary terms, 0 for out-of-vocabulary terms.
double idf(std::string_view term, const TfidfModel& model);

/// tf(t, doc) * idf(t) for each distinct in-vocabulary term; zero weights are not stored.
SparseVector vectorize(const TfidfModel& model, const TokenSeq& doc);

}  // namespace icl
