#include "icl/retriever.hpp"

#include <algorithm>
#include <cmath>

#include "icl/error.hpp"

namespace icl {

std::string_view to_string(RetrievalMode mode) {
  return mode == RetrievalMode::kRefit ? "refit" : "corpus-fit";
}

RetrievalMode parse_retrieval_mode(std::string_view text) {
  if (text == "corpus-fit" || text == "corpus_fit") return RetrievalMode::kCorpusFit;
  if (text == "refit") return RetrievalMode::kRefit;
  throw Error("unknown retrieval mode: " + std::string(text));
}

namespace {

TfidfMatrix vectorize_all(const TfidfModel& model, std::span<const TokenSeq> docs) {
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto v = vectorize(model, docs[d]);
    for (SparseVector::InnerIterator it(v); it; ++it) {
      triplets.emplace_back(static_cast<std::int64_t>(d), it.index(), it.value());
    }
  }
  TfidfMatrix m(static_cast<Eigen::Index>(docs.size()),
                static_cast<Eigen::Index>(model.vocabulary_size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

std::vector<TokenSeq> tokenize_sources(const ParallelCorpus& pairs, std::string_view lang) {
  std::vector<TokenSeq> docs;
  docs.reserve(pairs.size());
  for (const auto& p : pairs) docs.push_back(tokenize(p.source_text, lang));
  return docs;
}

TfidfModel fit_or_empty(std::span<const TokenSeq> docs) {
  const bool any_tokens =
      std::any_of(docs.begin(), docs.end(), [](const TokenSeq& d) { return !d.empty(); });
  if (!any_tokens) return TfidfModel({}, {}, docs.size());
  return fit_tfidf(docs);
}

}  // namespace

RetrievalIndex::RetrievalIndex(ParallelCorpus pairs, std::string lang, TfidfModel model,
                               TfidfMatrix doc_vectors)
    : pairs_(std::move(pairs)),
      lang_(std::move(lang)),
      model_(std::move(model)),
      doc_vectors_(std::move(doc_vectors)) {
  if (static_cast<std::size_t>(doc_vectors_.rows()) != pairs_.size()) {
    throw IndexFormatError("matrix rows do not match pool size");
  }
  doc_vectors_.makeCompressed();
  inverted_ = doc_vectors_;
  doc_norms_.resize(pairs_.size());
  for (Eigen::Index r = 0; r < doc_vectors_.outerSize(); ++r) {
    double sum = 0.0;
    for (TfidfMatrix::InnerIterator it(doc_vectors_, r); it; ++it) sum += it.value() * it.value();
    doc_norms_[static_cast<std::size_t>(r)] = std::sqrt(sum);
  }
}

std::vector<ScoredPair> RetrievalIndex::rank(const SparseVector& query, std::size_t k) const {
  const std::size_t n = std::min(k, pairs_.size());
  std::vector<ScoredPair> out;
  if (n == 0) return out;
  out.reserve(n);

  // Per-document dot products, accumulated in ascending term order.
  std::vector<double> dot(pairs_.size(), 0.0);
  std::vector<std::size_t> touched;
  std::vector<bool> seen(pairs_.size(), false);
  for (SparseVector::InnerIterator q(query); q; ++q) {
    if (q.index() >= inverted_.cols()) continue;
    for (decltype(inverted_)::InnerIterator it(inverted_, q.index()); it; ++it) {
      const auto d = static_cast<std::size_t>(it.index());
      if (!seen[d]) {
        seen[d] = true;
        touched.push_back(d);
      }
      dot[d] += q.value() * it.value();
    }
  }

  const double qnorm = sparse_norm(query);
  std::vector<std::pair<double, std::size_t>> hits;
  hits.reserve(touched.size());
  if (qnorm > 0.0) {
    for (auto d : touched) {
      if (doc_norms_[d] == 0.0) continue;
      const double s = std::clamp(dot[d] / (qnorm * doc_norms_[d]), 0.0, 1.0);
      if (s > 0.0) hits.emplace_back(s, d);
    }
  }
  const auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const auto take = std::min(n, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(take), hits.end(), better);
  hits.resize(take);

  for (const auto& [s, d] : hits) out.push_back({pairs_[d], s, d});
  if (out.size() < n) {
    // Zero-score fill: lowest indices not already returned.
    std::vector<bool> used(pairs_.size(), false);
    for (const auto& h : hits) used[h.second] = true;
    for (std::size_t d = 0; d < pairs_.size() && out.size() < n; ++d) {
      if (!used[d]) out.push_back({pairs_[d], 0.0, d});
    }
  }
  return out;
}

RetrievalIndex build_index(const ParallelCorpus& dselect, std::string_view lang) {
  if (dselect.empty()) throw EmptyCollection();
  const auto docs = tokenize_sources(dselect, lang);
  auto model = fit_or_empty(docs);
  auto matrix = vectorize_all(model, docs);
  return RetrievalIndex(dselect, std::string(lang), std::move(model), std::move(matrix));
}

std::vector<ScoredPair> retrieve_top_k(const RetrievalIndex& index, std::string_view prompt,
                                       std::size_t k, RetrievalMode mode) {
  if (k == 0 || index.size() == 0) return {};
  const auto query = tokenize(prompt, index.lang());
  if (mode == RetrievalMode::kCorpusFit) {
    return index.rank(vectorize(index.model(), query), k);
  }

  // Refit: the prompt joins the collection as its last document, so pool terms keep their
  // indices and only the IDF weights shift.
  auto docs = tokenize_sources(index.pairs(), index.lang());
  docs.push_back(query);
  auto model = fit_or_empty(docs);
  const auto query_vec = vectorize(model, query);
  docs.pop_back();
  auto matrix = vectorize_all(model, docs);
  const RetrievalIndex refit(index.pairs(), index.lang(), std::move(model), std::move(matrix));
  return refit.rank(query_vec, k);
}

}  // namespace icl
