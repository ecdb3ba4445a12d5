#pragma once

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "icl/corpus.hpp"
#include "icl/text.hpp"

namespace icl {

/// Rows are documents, columns are vocabulary terms.
template <typename Scalar>
using TfidfMatrixT = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, std::int64_t>;
using TfidfMatrix = TfidfMatrixT<double>;

/// Euclidean norm, accumulated in ascending index order.
template <typename Scalar>
Scalar sparse_norm(const SparseVectorT<Scalar>& v) {
  Scalar sum(0);
  for (typename SparseVectorT<Scalar>::InnerIterator it(v); it; ++it) sum += it.value() * it.value();
  return std::sqrt(sum);
}

/// dot(a, b) / (|a| |b|), clamped to [0, 1]; 0 when either vector has zero norm.
/// Meant for the nonnegative TF-IDF vectors produced by vectorize().
template <typename Scalar>
Scalar cosine_similarity(const SparseVectorT<Scalar>& a, const SparseVectorT<Scalar>& b) {
  const Scalar na = sparse_norm(a);
  const Scalar nb = sparse_norm(b);
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  return std::clamp(a.dot(b) / (na * nb), Scalar(0), Scalar(1));
}

enum class RetrievalMode {
  kCorpusFit,  // query vectorized with the prebuilt model
  kRefit,      // model refitted on the pool sources plus the query as one extra document
};

std::string_view to_string(RetrievalMode mode);
RetrievalMode parse_retrieval_mode(std::string_view text);

struct ScoredPair {
  SentencePair pair;
  double score = 0.0;
  std::size_t pair_index = 0;
};

/// TF-IDF matrix over the source side of a demonstration pool.
///
/// doc_vectors row i belongs to pairs()[i]; norms are cached per row. A column-major copy
/// of the matrix serves as the inverted index, so a query only touches documents that
/// share a term with it. Immutable after construction.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  RetrievalIndex(ParallelCorpus pairs, std::string lang, TfidfModel model, TfidfMatrix doc_vectors);

  const ParallelCorpus& pairs() const { return pairs_; }
  const std::string& lang() const { return lang_; }
  const TfidfModel& model() const { return model_; }
  const TfidfMatrix& doc_vectors() const { return doc_vectors_; }
  const std::vector<double>& doc_norms() const { return doc_norms_; }
  std::size_t size() const { return pairs_.size(); }

  SparseVector doc_vector(std::size_t i) const {
    return doc_vectors_.row(static_cast<Eigen::Index>(i)).transpose();
  }

  /// Ranks every document against an already-vectorized query.
  std::vector<ScoredPair> rank(const SparseVector& query, std::size_t k) const;

 private:
  ParallelCorpus pairs_;
  std::string lang_;
  TfidfModel model_;
  TfidfMatrix doc_vectors_;
  Eigen::SparseMatrix<double, Eigen::ColMajor, std::int64_t> inverted_;
  std::vector<double> doc_norms_;
};

/// Fits the model on the tokenized source sentences (tokenizer language `lang`).
/// Throws EmptyCollection for an empty pool.
RetrievalIndex build_index(const ParallelCorpus& dselect, std::string_view lang);

/// The min(k, |pool|) best pairs by cosine score, descending, ties by ascending pair index.
/// A query with no usable terms yields the lowest-index pairs with score 0.
std::vector<ScoredPair> retrieve_top_k(const RetrievalIndex& index, std::string_view prompt,
                                       std::size_t k,
                                       RetrievalMode mode = RetrievalMode::kCorpusFit);

/// Versioned binary container (little-endian): pairs, model state, matrix, norms.
/// Doubles are stored as raw IEEE-754 bits, so a reloaded index ranks bit-identically.
void save_index(const RetrievalIndex& index, const std::filesystem::path& path);
RetrievalIndex load_index(const std::filesystem::path& path);

}  // namespace icl
