#include <bit>
#include <cstring>
#include <fstream>

#include "icl/error.hpp"
#include "icl/retriever.hpp"

namespace icl {

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

namespace {

constexpr char kMagic[8] = {'I', 'C', 'L', 'R', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write index to " + path.string());
  }
  template <typename T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void str(std::string_view s) {
    pod<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  template <typename T>
  void array(const T* data, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("short write while saving index");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open index " + path.string());
  }
  template <typename T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    check();
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > (std::uint64_t{1} << 32)) throw IndexFormatError("implausible string length");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }
  template <typename T>
  void array(T* data, std::size_t n) {
    in_.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(T)));
    check();
  }

 private:
  void check() {
    if (!in_) throw IndexFormatError("truncated index file");
  }
  std::ifstream in_;
};

}  // namespace

void save_index(const RetrievalIndex& index, const std::filesystem::path& path) {
  Writer w(path);
  w.array(kMagic, sizeof kMagic);
  w.pod(kVersion);
  w.str(index.pairs().lang_pair().source);
  w.str(index.pairs().lang_pair().target);
  w.str(index.lang());

  w.pod<std::uint64_t>(index.size());
  for (const auto& p : index.pairs()) {
    w.str(p.source_text);
    w.str(p.target_text);
  }

  const auto& model = index.model();
  w.pod<std::uint64_t>(model.num_docs());
  w.pod<std::uint64_t>(model.vocabulary_size());
  for (std::size_t i = 0; i < model.vocabulary_size(); ++i) {
    w.str(model.terms()[i]);
    w.pod<std::uint64_t>(model.doc_freq()[i]);
  }

  // CSR arrays of the compressed matrix.
  const auto& m = index.doc_vectors();
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
  w.pod<std::uint64_t>(static_cast<std::uint64_t>(m.nonZeros()));
  w.array(m.outerIndexPtr(), static_cast<std::size_t>(m.outerSize()) + 1);
  w.array(m.innerIndexPtr(), static_cast<std::size_t>(m.nonZeros()));
  w.array(m.valuePtr(), static_cast<std::size_t>(m.nonZeros()));
  w.array(index.doc_norms().data(), index.doc_norms().size());
  w.finish();
}

RetrievalIndex load_index(const std::filesystem::path& path) {
  Reader r(path);
  char magic[sizeof kMagic];
  r.array(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IndexFormatError(path.string() + " is not a retrieval index");
  }
  if (const auto version = r.pod<std::uint32_t>(); version != kVersion) {
    throw IndexFormatError("unsupported index version " + std::to_string(version));
  }
  auto src = r.str();
  auto tgt = r.str();
  LangPair lang_pair(std::move(src), std::move(tgt));
  auto lang = r.str();

  const auto n = r.pod<std::uint64_t>();
  std::vector<SentencePair> pairs;
  pairs.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto s = r.str();
    auto t = r.str();
    pairs.push_back({std::move(s), std::move(t), i});
  }

  const auto num_docs = r.pod<std::uint64_t>();
  const auto vocab = r.pod<std::uint64_t>();
  std::vector<std::string> terms;
  std::vector<std::uint64_t> df;
  terms.reserve(vocab);
  df.reserve(vocab);
  for (std::uint64_t i = 0; i < vocab; ++i) {
    terms.push_back(r.str());
    df.push_back(r.pod<std::uint64_t>());
  }
  TfidfModel model(std::move(terms), std::move(df), num_docs);

  const auto cols = r.pod<std::uint64_t>();
  const auto nnz = r.pod<std::uint64_t>();
  if (cols != vocab) throw IndexFormatError("matrix width does not match vocabulary");
  std::vector<std::int64_t> outer(n + 1);
  std::vector<std::int64_t> inner(nnz);
  std::vector<double> values(nnz);
  r.array(outer.data(), outer.size());
  r.array(inner.data(), inner.size());
  r.array(values.data(), values.size());
  if (outer.front() != 0 || static_cast<std::uint64_t>(outer.back()) != nnz) {
    throw IndexFormatError("corrupt matrix offsets");
  }
  for (auto c : inner) {
    if (c < 0 || static_cast<std::uint64_t>(c) >= cols) throw IndexFormatError("column out of range");
  }
  std::vector<double> norms(n);
  r.array(norms.data(), norms.size());

  TfidfMatrix matrix = Eigen::Map<const TfidfMatrix>(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(nnz),
      outer.data(), inner.data(), values.data());
  RetrievalIndex index(ParallelCorpus(std::move(lang_pair), std::move(pairs)), std::move(lang),
                       std::move(model), std::move(matrix));
  if (index.doc_norms() != norms) throw IndexFormatError("stored norms do not match vectors");
  return index;
}

}  // namespace icl
