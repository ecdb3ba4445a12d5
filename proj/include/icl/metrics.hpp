#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icl/text.hpp"

namespace icl {

inline constexpr std::size_t kMaxNgramOrder = 4;

struct NGramStats {
  std::size_t order = 1;
  std::size_t clipped_matches = 0;
  std::size_t candidate_total = 0;
};

struct BleuScore {
  double score = 0.0;
  std::array<double, kMaxNgramOrder> precisions{};
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  /// Set when some order had no candidate n-grams or no matches, which forces score 0.
  bool zero_precision = false;
};

/// Clipped n-gram matches of a hypothesis against a single reference.
NGramStats modified_ngram_stats(const TokenSeq& hypothesis, const TokenSeq& reference,
                                std::size_t n);

/// 1 when hyp_len > ref_len, else exp(1 - ref_len / hyp_len); 0 for an empty hypothesis.
/// An empty reference gives 1.
double brevity_penalty(std::size_t hyp_len, std::size_t ref_len);

/// Corpus-level BLEU-4: n-gram statistics and lengths are summed over all segments before
/// the precisions, the geometric mean and the brevity penalty are taken.
/// Throws LengthMismatch when the sequences differ in length or are empty.
BleuScore corpus_bleu(std::span<const TokenSeq> hypotheses, std::span<const TokenSeq> references);

/// Arithmetic mean of per-segment BLEU-4. Orders with no matches use `epsilon` as the
/// numerator (denominator at least 1).
double mean_sentence_bleu(std::span<const TokenSeq> hypotheses,
                          std::span<const TokenSeq> references, double epsilon = 0.1);

/// Tokenizes both sides with the `lang` tokenizer and scores them.
BleuScore corpus_bleu(std::span<const std::string> hypotheses,
                      std::span<const std::string> references, std::string_view lang);

}  // namespace icl
