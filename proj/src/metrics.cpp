#include "icl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "icl/error.hpp"

namespace icl {

namespace {

using Ngram = std::span<const std::string>;

struct NgramLess {
  bool operator()(Ngram a, Ngram b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

std::map<Ngram, std::size_t, NgramLess> count_ngrams(const TokenSeq& seq, std::size_t n) {
  std::map<Ngram, std::size_t, NgramLess> counts;
  if (seq.size() < n) return counts;
  const Ngram tokens(seq.tokens);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[tokens.subspan(i, n)];
  return counts;
}

void check_lengths(std::size_t hyps, std::size_t refs) {
  if (hyps != refs || hyps == 0) throw LengthMismatch(hyps, refs);
}

}  // namespace

NGramStats modified_ngram_stats(const TokenSeq& hypothesis, const TokenSeq& reference,
                                std::size_t n) {
  if (n == 0) throw Error("n-gram order must be >= 1");
  NGramStats stats{n, 0, hypothesis.size() >= n ? hypothesis.size() - n + 1 : 0};
  const auto ref = count_ngrams(reference, n);
  for (const auto& [gram, count] : count_ngrams(hypothesis, n)) {
    const auto it = ref.find(gram);
    if (it != ref.end()) stats.clipped_matches += std::min(count, it->second);
  }
  return stats;
}

double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (ref_len == 0) return 1.0;
  if (hyp_len == 0) return 0.0;
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

BleuScore corpus_bleu(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references) {
  check_lengths(hypotheses.size(), references.size());

  std::array<std::size_t, kMaxNgramOrder> clipped{}, total{};
  BleuScore out;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    out.hyp_length += hypotheses[s].size();
    out.ref_length += references[s].size();
    for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
      const auto st = modified_ngram_stats(hypotheses[s], references[s], n);
      clipped[n - 1] += st.clipped_matches;
      total[n - 1] += st.candidate_total;
    }
  }

  out.brevity_penalty = brevity_penalty(out.hyp_length, out.ref_length);
  double log_sum = 0.0;
  for (std::size_t i = 0; i < kMaxNgramOrder; ++i) {
    out.precisions[i] =
        total[i] ? static_cast<double>(clipped[i]) / static_cast<double>(total[i]) : 0.0;
    if (out.precisions[i] == 0.0) {
      out.zero_precision = true;
    } else {
      log_sum += std::log(out.precisions[i]);
    }
  }
  out.score = out.zero_precision
                  ? 0.0
                  : out.brevity_penalty * std::exp(log_sum / static_cast<double>(kMaxNgramOrder));
  return out;
}

double mean_sentence_bleu(std::span<const TokenSeq> hypotheses,
                          std::span<const TokenSeq> references, double epsilon) {
  check_lengths(hypotheses.size(), references.size());
  double sum = 0.0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
      const auto st = modified_ngram_stats(hypotheses[s], references[s], n);
      const double num = st.clipped_matches ? static_cast<double>(st.clipped_matches) : epsilon;
      const double den = static_cast<double>(std::max<std::size_t>(st.candidate_total, 1));
      log_sum += std::log(num / den);
    }
    sum += brevity_penalty(hypotheses[s].size(), references[s].size()) *
           std::exp(log_sum / static_cast<double>(kMaxNgramOrder));
  }
  return sum / static_cast<double>(hypotheses.size());
}

BleuScore corpus_bleu(std::span<const std::string> hypotheses,
                      std::span<const std::string> references, std::string_view lang) {
  check_lengths(hypotheses.size(), references.size());
  std::vector<TokenSeq> h, r;
  h.reserve(hypotheses.size());
  r.reserve(references.size());
  for (const auto& s : hypotheses) h.push_back(tokenize(s, lang));
  for (const auto& s : references) r.push_back(tokenize(s, lang));
  return corpus_bleu(h, r);
}

}  // namespace icl
