#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "icl/error.hpp"
#include "icl/retriever.hpp"
#include "oracles.hpp"

using namespace icl;

namespace {

SparseVector sparse(std::initializer_list<std::pair<int, double>> entries, int dim) {
  SparseVector v(dim);
  for (const auto& [i, w] : entries) v.insert(i) = w;
  return v;
}

std::vector<double> dense_query(const oracle::DenseTfidf& m, const std::string& prompt) {
  return m.weigh(tokenize(prompt, "en").tokens);
}

void check_against_oracle(const std::vector<ScoredPair>& got, const std::vector<oracle::Hit>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t r = 0; r < got.size(); ++r) {
    CHECK(got[r].pair_index == want[r].index);
    CHECK(got[r].score == want[r].score);
  }
}

}  // namespace

TEST_CASE("cosine similarity") {
  const auto a = sparse({{0, 1.0}, {1, 2.0}}, 3);
  const auto b = sparse({{0, 2.0}, {1, 1.0}}, 3);
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(a, sparse({{2, 5.0}}, 3)) == 0.0);
  CHECK(cosine_similarity(a, SparseVector(3)) == 0.0);

  const Eigen::SparseVector<float> af = a.cast<float>();
  CHECK(cosine_similarity(af, af) == doctest::Approx(1.0f));
}

TEST_CASE("property: cosine similarity is exactly symmetric") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    SparseVector a(50), b(50);
    for (int i = 0; i < 50; ++i) {
      if (uniform_below(rng, 3) == 0) a.insert(i) = static_cast<double>(uniform_below(rng, 1000) + 1) / 7.0;
      if (uniform_below(rng, 3) == 0) b.insert(i) = static_cast<double>(uniform_below(rng, 1000) + 1) / 3.0;
    }
    const double ab = cosine_similarity(a, b);
    CHECK(ab == cosine_similarity(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("build_index") {
  const auto pool = fixtures::synthetic_corpus(40, 1);
  const auto index = build_index(pool, "en");
  CHECK(index.size() == 40);
  CHECK(index.doc_vectors().rows() == 40);
  CHECK(index.doc_norms().size() == 40);
  for (std::size_t i = 0; i < index.size(); ++i) {
    CHECK(index.doc_norms()[i] == doctest::Approx(index.doc_vector(i).norm()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_index(ParallelCorpus{}, "en"), EmptyCollection);
}

TEST_CASE("single-pair pool has one empty vector") {
  const ParallelCorpus pool({"zh", "en"}, {{"你好吗", "How are you", 0}});
  const auto index = build_index(pool, "zh");
  CHECK(index.size() == 1);
  CHECK(index.doc_vector(0).nonZeros() == 0);
  CHECK(index.doc_norms()[0] == 0.0);
  const auto hits = retrieve_top_k(index, "你好吗", 4);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].score == 0.0);
}

TEST_CASE("self retrieval") {
  const ParallelCorpus pool({"de", "en"}, {{"alpha beta", "A B", 0},
                                           {"gamma delta epsilon", "G D E", 0},
                                           {"beta zeta", "B Z", 0},
                                           {"eta theta", "E T", 0}});
  const auto index = build_index(pool, "en");
  for (const auto mode : {RetrievalMode::kCorpusFit, RetrievalMode::kRefit}) {
    const auto hits = retrieve_top_k(index, "gamma delta epsilon", 1, mode);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].pair_index == 1);
    CHECK(hits[0].pair.target_text == "G D E");
    CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("k handling and zero-norm prompts") {
  const auto pool = fixtures::synthetic_corpus(10, 2);
  const auto index = build_index(pool, "en");
  CHECK(retrieve_top_k(index, "w1 w2", 0).empty());
  CHECK(retrieve_top_k(index, "w1 w2", 4).size() == 4);
  CHECK(retrieve_top_k(index, "w1 w2", 50).size() == 10);

  const auto hits = retrieve_top_k(index, "nothing-known here", 3);
  REQUIRE(hits.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(hits[i].pair_index == i);
    CHECK(hits[i].score == 0.0);
  }
  CHECK(retrieve_top_k(index, "", 2, RetrievalMode::kRefit).size() == 2);
}

TEST_CASE("partial matches are padded with lowest-index zero-score pairs") {
  const ParallelCorpus pool({"de", "en"}, {{"a b", "1", 0}, {"c d", "2", 0}, {"e f", "3", 0}, {"c g", "4", 0}});
  const auto index = build_index(pool, "en");
  const auto hits = retrieve_top_k(index, "g", 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].pair_index == 3);
  CHECK(hits[0].score > 0.0);
  CHECK(hits[1].pair_index == 0);
  CHECK(hits[2].pair_index == 1);
  CHECK(hits[1].score == 0.0);
}

TEST_CASE("duplicate sources tie-break by index") {
  const ParallelCorpus pool({"de", "en"}, {{"x y", "first", 0}, {"p q", "other", 0}, {"x y", "second", 0}});
  const auto index = build_index(pool, "en");
  const auto hits = retrieve_top_k(index, "x y", 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].pair_index == 0);
  CHECK(hits[1].pair_index == 2);
  CHECK(hits[0].score == hits[1].score);
}

TEST_CASE("200-pair pool matches the exhaustive dense oracle") {
  const auto pool = fixtures::synthetic_corpus(200, 3, 150);
  const auto index = build_index(pool, "en");
  std::vector<oracle::Tokens> docs;
  for (const auto& p : pool) docs.push_back(tokenize(p.source_text, "en").tokens);
  const auto dense = oracle::dense_tfidf(docs);

  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto prompt = fixtures::random_sentence(rng, 200, 2, 10);
    check_against_oracle(retrieve_top_k(index, prompt, 10),
                         oracle::exhaustive_top_k(dense.rows, dense_query(dense, prompt), 10));

    auto with_prompt = docs;
    with_prompt.push_back(tokenize(prompt, "en").tokens);
    const auto refit = oracle::dense_tfidf(with_prompt);
    auto rows = refit.rows;
    rows.pop_back();
    check_against_oracle(retrieve_top_k(index, prompt, 10, RetrievalMode::kRefit),
                         oracle::exhaustive_top_k(rows, refit.rows.back(), 10));
  }
}

TEST_CASE("property: results are sorted, bounded, and prefix-consistent in k") {
  const auto pool = fixtures::synthetic_corpus(120, 9, 80);
  const auto index = build_index(pool, "en");
  Rng rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const auto prompt = fixtures::random_sentence(rng, 100, 1, 8);
    for (const auto mode : {RetrievalMode::kCorpusFit, RetrievalMode::kRefit}) {
      const auto big = retrieve_top_k(index, prompt, 15, mode);
      for (std::size_t i = 0; i < big.size(); ++i) {
        CHECK(big[i].score >= 0.0);
        CHECK(big[i].score <= 1.0);
        if (i) CHECK(big[i - 1].score >= big[i].score);
      }
      for (std::size_t k = 0; k < 15; ++k) {
        const auto small = retrieve_top_k(index, prompt, k, mode);
        REQUIRE(small.size() == k);
        for (std::size_t i = 0; i < k; ++i) CHECK(small[i].pair_index == big[i].pair_index);
      }
    }
  }
}

TEST_CASE("property: scaling the query vector keeps the ranking") {
  const auto pool = fixtures::synthetic_corpus(150, 12, 100);
  const auto index = build_index(pool, "en");
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto prompt = fixtures::random_sentence(rng, 120, 2, 9);
    const auto q = vectorize(index.model(), tokenize(prompt, "en"));
    const auto base = index.rank(q, 12);
    for (const double c : {0.25, 3.0, 1e3}) {
      const SparseVector scaled = q * c;
      const auto hits = index.rank(scaled, 12);
      REQUIRE(hits.size() == base.size());
      for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].pair_index == base[i].pair_index);
    }
  }
}

TEST_CASE("persisted index reproduces retrieval bit-exactly") {
  fixtures::TempDir dir;
  const auto pool = fixtures::synthetic_corpus(300, 14);
  const auto index = build_index(pool, "en");
  save_index(index, dir / "idx.bin");
  const auto loaded = load_index(dir / "idx.bin");

  CHECK(loaded.pairs().pairs() == index.pairs().pairs());
  CHECK(loaded.pairs().lang_pair() == index.pairs().lang_pair());
  CHECK(loaded.lang() == "en");
  CHECK(loaded.model().terms() == index.model().terms());
  CHECK(loaded.model().idf_weights() == index.model().idf_weights());
  CHECK(loaded.doc_norms() == index.doc_norms());

  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto prompt = fixtures::random_sentence(rng, 300, 2, 8);
    for (const auto mode : {RetrievalMode::kCorpusFit, RetrievalMode::kRefit}) {
      const auto a = retrieve_top_k(index, prompt, 8, mode);
      const auto b = retrieve_top_k(loaded, prompt, 8, mode);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pair_index == b[i].pair_index);
        CHECK(std::memcmp(&a[i].score, &b[i].score, sizeof(double)) == 0);
      }
    }
  }
}

TEST_CASE("corrupt index files are rejected") {
  fixtures::TempDir dir;
  fixtures::write_text(dir / "junk", "definitely not an index");
  CHECK_THROWS_AS(load_index(dir / "junk"), IndexFormatError);

  save_index(build_index(fixtures::synthetic_corpus(20, 1), "en"), dir / "idx");
  auto bytes = fixtures::read_text(dir / "idx");
  fixtures::write_text(dir / "trunc", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_index(dir / "trunc"), IndexFormatError);
  CHECK_THROWS_AS(load_index(dir / "missing"), IoError);
}

TEST_CASE("CJK retrieval over character bigrams") {
  const ParallelCorpus pool({"zh", "en"}, {{"我喜欢猫。", "I like cats.", 0},
                                           {"今天天气很好。", "The weather is nice today.", 0},
                                           {"我喜欢狗。", "I like dogs.", 0},
                                           {"他在学校学习。", "He studies at school.", 0}});
  const auto index = build_index(pool, "zh");
  const auto hits = retrieve_top_k(index, "今天天气不错", 2);
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].pair_index == 1);
  CHECK(hits[0].score > 0.0);
}
