#include "icl/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "icl/error.hpp"
#include "icl/unicode.hpp"

namespace icl {

bool uses_character_bigrams(std::string_view lang) { return lang == "zh" || lang == "ja"; }

namespace {

void emit_bigrams(std::span<const char32_t> run, std::vector<std::string>& out) {
  if (run.empty()) return;
  if (run.size() == 1) {
    std::string t;
    append_utf8(t, run[0]);
    out.push_back(std::move(t));
    return;
  }
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    std::string t;
    append_utf8(t, run[i]);
    append_utf8(t, run[i + 1]);
    out.push_back(std::move(t));
  }
}

}  // namespace

TokenSeq tokenize(std::string_view text, std::string_view lang) {
  TokenSeq seq{{}, std::string(lang)};
  const auto cps = decode_utf8(to_lower_utf8(text));

  if (uses_character_bigrams(lang)) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= cps.size(); ++i) {
      if (i == cps.size() || is_unicode_whitespace(cps[i]) || is_punctuation(cps[i])) {
        emit_bigrams(std::span(cps).subspan(start, i - start), seq.tokens);
        start = i + 1;
      }
    }
    return seq;
  }

  std::size_t start = 0;
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    if (i < cps.size() && !is_unicode_whitespace(cps[i])) continue;
    std::size_t lo = start, hi = i;
    while (lo < hi && is_punctuation(cps[lo])) ++lo;
    while (hi > lo && is_punctuation(cps[hi - 1])) --hi;
    if (lo < hi) {
      std::string t;
      for (std::size_t j = lo; j < hi; ++j) append_utf8(t, cps[j]);
      seq.tokens.push_back(std::move(t));
    }
    start = i + 1;
  }
  return seq;
}

double tf(std::string_view term, const TokenSeq& doc) {
  if (doc.empty()) throw EmptyDocument();
  const auto count = std::count(doc.tokens.begin(), doc.tokens.end(), term);
  return static_cast<double>(count) / static_cast<double>(doc.size());
}

TfidfModel::TfidfModel(std::vector<std::string> terms, std::vector<std::uint64_t> doc_freq,
                       std::uint64_t num_docs)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), num_docs_(num_docs) {
  if (terms_.size() != doc_freq_.size()) throw IndexFormatError("vocabulary/df size mismatch");
  vocabulary_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (doc_freq_[i] < 1 || doc_freq_[i] > num_docs_) {
      throw IndexFormatError("document frequency out of range for term " + terms_[i]);
    }
    if (!vocabulary_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second) {
      throw IndexFormatError("duplicate vocabulary term " + terms_[i]);
    }
  }
  compute_idf();
}

void TfidfModel::compute_idf() {
  idf_.resize(doc_freq_.size());
  const auto n = static_cast<double>(num_docs_);
  for (std::size_t i = 0; i < doc_freq_.size(); ++i) {
    idf_[i] = std::log(n / static_cast<double>(doc_freq_[i]));
  }
}

std::int64_t TfidfModel::find(std::string_view term) const {
  const auto it = vocabulary_.find(term);
  return it == vocabulary_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

TfidfModel fit_tfidf(std::span<const TokenSeq> docs) {
  const bool any_tokens =
      std::any_of(docs.begin(), docs.end(), [](const TokenSeq& d) { return !d.empty(); });
  if (!any_tokens) throw EmptyCollection();

  TfidfModel model;
  model.num_docs_ = docs.size();
  // Last document that counted each term, so repeats within a doc count once.
  std::vector<std::size_t> last_doc;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d].tokens) {
      auto [it, inserted] =
          model.vocabulary_.try_emplace(token, static_cast<std::uint32_t>(model.terms_.size()));
      if (inserted) {
        model.terms_.push_back(token);
        model.doc_freq_.push_back(1);
        last_doc.push_back(d);
      } else if (last_doc[it->second] != d) {
        ++model.doc_freq_[it->second];
        last_doc[it->second] = d;
      }
    }
  }
  model.compute_idf();
  return model;
}

double idf(std::string_view term, const TfidfModel& model) {
  const auto i = model.find(term);
  return i < 0 ? 0.0 : model.idf_weights()[static_cast<std::size_t>(i)];
}

SparseVector vectorize(const TfidfModel& model, const TokenSeq& doc) {
  SparseVector v(static_cast<Eigen::Index>(model.vocabulary_size()));
  if (doc.empty()) return v;

  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& token : doc.tokens) {
    const auto i = model.find(token);
    if (i >= 0) ++counts[static_cast<std::uint32_t>(i)];
  }
  const auto len = static_cast<double>(doc.size());
  v.reserve(static_cast<Eigen::Index>(counts.size()));
  for (const auto& [term, count] : counts) {
    const double w = (static_cast<double>(count) / len) * model.idf_weights()[term];
    if (w > 0.0) v.insertBack(term) = w;
  }
  return v;
}

}  // namespace icl
