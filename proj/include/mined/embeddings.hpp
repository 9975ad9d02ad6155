#pragma once

// Word-vector tables, sentence embedding providers and the on-disk
// embedding cache.

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include "mined/error.hpp"
#include "mined/textalign.hpp"

namespace mined {

using Vector = std::vector<float>;

/// Token -> dense vector, keys normalized with the word tokenizer policy so
/// lookups see the same casing as tokenized text.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dimension,
                           NormalizationPolicy policy = NormalizationPolicy::forWord())
      : dimension_(dimension), policy_(policy) {
    if (dimension == 0) throw InvalidArgument("word vector dimension must be positive");
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  const NormalizationPolicy& policy() const { return policy_; }

  /// Returns false (and keeps the existing vector) when the normalized token
  /// is already present.
  bool insert(std::string_view token, Vector v) {
    if (v.size() != dimension_) {
      throw InvalidArgument("vector for '" + std::string(token) + "' has dimension " +
                            std::to_string(v.size()) + ", table expects " +
                            std::to_string(dimension_));
    }
    std::string key = normalizeText(token, policy_);
    if (index_.contains(key)) return false;
    index_.emplace(key, entries_.size());
    entries_.emplace_back(std::move(key), std::move(v));
    return true;
  }

  const Vector* find(std::string_view token) const {
    auto it = index_.find(normalizeText(token, policy_));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  /// Lookup of a token that is already normalized (e.g. from tokenize()).
  const Vector* findNormalized(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }

  const std::vector<std::pair<std::string, Vector>>& entries() const { return entries_; }

 private:
  std::size_t dimension_;
  NormalizationPolicy policy_;
  std::vector<std::pair<std::string, Vector>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::vector<std::string_view> splitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parseNumber(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Reads the fastText .vec text format: an optional "count dim" header, then
/// one "token v1 ... vdim" line per entry.
inline WordVectorTable loadWordVectors(const std::filesystem::path& path,
                                       NormalizationPolicy policy = NormalizationPolicy::forWord()) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open word vector file " + path.string(), 0);

  std::optional<WordVectorTable> table;
  std::optional<std::size_t> declaredCount;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto fields = detail::splitFields(line);
    if (fields.empty()) continue;
    if (!table && !declaredCount && fields.size() == 2) {
      std::size_t count = 0, dim = 0;
      if (detail::parseNumber(fields[0], count) && detail::parseNumber(fields[1], dim)) {
        if (dim == 0) throw ParseError("header declares dimension 0", lineNo);
        declaredCount = count;
        table.emplace(dim, policy);
        continue;
      }
    }
    if (!table) table.emplace(fields.size() - 1 == 0 ? 1 : fields.size() - 1, policy);
    if (fields.size() - 1 != table->dimension()) {
      throw ParseError("expected " + std::to_string(table->dimension()) + " values for '" +
                           std::string(fields[0]) + "', found " + std::to_string(fields.size() - 1),
                       lineNo);
    }
    Vector v(table->dimension());
    for (std::size_t d = 0; d < v.size(); ++d) {
      if (!detail::parseNumber(fields[d + 1], v[d])) {
        throw ParseError("malformed number '" + std::string(fields[d + 1]) + "'", lineNo);
      }
    }
    table->insert(fields[0], std::move(v));
  }
  if (!table) throw ParseError("word vector file " + path.string() + " is empty", 0);
  if (declaredCount && *declaredCount != table->size()) {
    warn("word vector header declares " + std::to_string(*declaredCount) + " entries, loaded " +
         std::to_string(table->size()));
  }
  return std::move(*table);
}

inline void saveWordVectors(const WordVectorTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write word vector file " + path.string());
  out << table.size() << ' ' << table.dimension() << '\n';
  out << std::setprecision(9);
  for (const auto& [token, v] : table.entries()) {
    out << token;
    for (float x : v) out << ' ' << x;
    out << '\n';
  }
  if (!out) throw Error("failed writing word vector file " + path.string());
}

class SentenceEmbeddingProvider {
 public:
  virtual ~SentenceEmbeddingProvider() = default;

  /// Stable identity used for cache keying.
  virtual std::string providerId() const = 0;

  /// Output dimension, or 0 while still unknown (remote providers learn it
  /// from the first response).
  virtual std::size_t dimension() const = 0;

  /// One vector per input text, same order. Must be safe to call concurrently.
  virtual std::vector<Vector> embed(std::span<const std::string> texts) const = 0;

  Vector embedOne(const std::string& text) const {
    auto out = embed(std::span<const std::string>(&text, 1));
    if (out.size() != 1) throw ScoringError("provider " + providerId() + " returned no vector");
    return std::move(out.front());
  }
};

using ProviderPtr = std::shared_ptr<const SentenceEmbeddingProvider>;

class BagOfVectorsProvider final : public SentenceEmbeddingProvider {
 public:
  BagOfVectorsProvider(std::shared_ptr<const WordVectorTable> table, std::string id)
      : table_(std::move(table)), id_(std::move(id)) {}

  std::string providerId() const override { return id_; }
  std::size_t dimension() const override { return table_->dimension(); }

  std::vector<Vector> embed(std::span<const std::string> texts) const override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(embedText(text));
    return out;
  }

  /// Mean of the in-vocabulary word vectors; zero vector when none.
  Vector embedText(std::string_view text) const {
    const std::size_t dim = table_->dimension();
    std::vector<double> acc(dim, 0.0);
    std::size_t hits = 0;
    for (const auto& tok : tokenize(text, Granularity::Word, table_->policy()).tokens) {
      if (const Vector* v = table_->findNormalized(tok)) {
        for (std::size_t d = 0; d < dim; ++d) acc[d] += (*v)[d];
        ++hits;
      }
    }
    Vector mean(dim, 0.0F);
    if (hits > 0) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] = static_cast<float>(acc[d] / static_cast<double>(hits));
    }
    return mean;
  }

 private:
  std::shared_ptr<const WordVectorTable> table_;
  std::string id_;
};

inline ProviderPtr bagOfVectorsProvider(std::shared_ptr<const WordVectorTable> table,
                                        std::string id = {}) {
  if (id.empty()) {
    id = "bag-of-vectors:" + std::to_string(table->dimension()) + "x" + std::to_string(table->size());
  }
  return std::make_shared<BagOfVectorsProvider>(std::move(table), std::move(id));
}

inline std::string sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

/// Persistent vector store: {base}.idx holds "hash\toffset\tlen" lines,
/// {base}.bin holds packed little-endian float32 data. offset and len are in
/// bytes. Later index lines for a key supersede earlier ones.
class EmbeddingCache {
 public:
  static std::shared_ptr<EmbeddingCache> open(const std::filesystem::path& base) {
    return std::shared_ptr<EmbeddingCache>(new EmbeddingCache(base));
  }

  static std::string key(std::string_view providerId, std::string_view text) {
    std::string material;
    material.reserve(providerId.size() + 1 + text.size());
    material.append(providerId);
    material.push_back('\0');
    material.append(text);
    return sha256Hex(material);
  }

  std::filesystem::path indexPath() const { return pathWith(".idx"); }
  std::filesystem::path dataPath() const { return pathWith(".bin"); }

  std::optional<Vector> lookup(std::string_view providerId, std::string_view text) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(key(providerId, text));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Appends one entry. Throws Error on I/O failure.
  void store(std::string_view providerId, std::string_view text, const Vector& v) {
    std::string k = key(providerId, text);
    std::unique_lock lock(mu_);
    std::ofstream bin(dataPath(), std::ios::binary | std::ios::app);
    if (!bin) throw Error("cannot open cache data file " + dataPath().string());
    bin.seekp(0, std::ios::end);
    auto offset = static_cast<std::uint64_t>(bin.tellp());
    std::string bytes(v.size() * 4, '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, &v[i], 4);
      for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    bin.flush();
    if (!bin) throw Error("failed writing cache data file " + dataPath().string());
    std::ofstream idx(indexPath(), std::ios::app);
    idx << k << '\t' << offset << '\t' << bytes.size() << '\n';
    idx.flush();
    if (!idx) throw Error("failed writing cache index file " + indexPath().string());
    entries_[k] = v;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }

 private:
  explicit EmbeddingCache(std::filesystem::path base) : base_(std::move(base)) { load(); }

  std::filesystem::path pathWith(const char* ext) const {
    auto p = base_;
    p += ext;
    return p;
  }

  void load() {
    std::ifstream idx(indexPath());
    if (!idx) return;
    std::ifstream bin(dataPath(), std::ios::binary);
    std::string data;
    if (bin) data.assign(std::istreambuf_iterator<char>(bin), std::istreambuf_iterator<char>());
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(idx, line)) {
      ++lineNo;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string k;
      std::uint64_t offset = 0, len = 0;
      if (!(fields >> k >> offset >> len) || len % 4 != 0 || offset + len > data.size()) {
        warn("embedding cache " + indexPath().string() + ": skipping bad entry at line " +
             std::to_string(lineNo));
        continue;
      }
      Vector v(len / 4);
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[offset + i * 4 + b])) << (8 * b);
        }
        std::memcpy(&v[i], &bits, 4);
      }
      entries_[k] = std::move(v);
    }
  }

  std::filesystem::path base_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Vector> entries_;
};

/// Cache-first provider. Misses go to the inner provider in one batch and
/// are persisted before returning. Cached vectors whose dimension disagrees
/// with the provider are discarded and refetched. Cache write failures are
/// reported through warn() and do not affect results.
class CachedProvider final : public SentenceEmbeddingProvider {
 public:
  CachedProvider(ProviderPtr inner, std::shared_ptr<EmbeddingCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string providerId() const override { return inner_->providerId(); }
  std::size_t dimension() const override { return inner_->dimension(); }

  std::vector<Vector> embed(std::span<const std::string> texts) const override {
    const std::string id = inner_->providerId();
    std::vector<std::optional<Vector>> found(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) found[i] = cache_->lookup(id, texts[i]);

    auto fetchMissing = [&] {
      std::vector<std::string> batch;
      std::unordered_map<std::string, std::size_t> slot;
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!found[i] && !slot.contains(texts[i])) {
          slot.emplace(texts[i], batch.size());
          batch.push_back(texts[i]);
        }
      }
      if (batch.empty()) return;
      auto vectors = inner_->embed(batch);
      if (vectors.size() != batch.size()) {
        throw ScoringError("provider " + id + " returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(batch.size()) + " texts");
      }
      for (std::size_t b = 0; b < batch.size(); ++b) persist(id, batch[b], vectors[b]);
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (!found[i]) found[i] = vectors[slot.at(texts[i])];
      }
    };

    fetchMissing();
    if (std::size_t dim = inner_->dimension(); dim != 0) {
      bool rejected = false;
      for (std::size_t i = 0; i < texts.size(); ++i) {
        if (found[i] && found[i]->size() != dim) {
          warn("embedding cache entry for provider " + id + " has dimension " +
               std::to_string(found[i]->size()) + ", expected " + std::to_string(dim) +
               "; refetching");
          found[i].reset();
          rejected = true;
        }
      }
      if (rejected) fetchMissing();
    }

    std::vector<Vector> out;
    out.reserve(texts.size());
    for (auto& v : found) out.push_back(std::move(*v));
    return out;
  }

 private:
  void persist(const std::string& id, const std::string& text, const Vector& v) const {
    if (cacheBroken_.load()) return;
    try {
      cache_->store(id, text, v);
    } catch (const Error& e) {
      cacheBroken_ = true;
      warn(std::string("embedding cache disabled, continuing without it: ") + e.what());
    }
  }

  ProviderPtr inner_;
  std::shared_ptr<EmbeddingCache> cache_;
  mutable std::atomic<bool> cacheBroken_{false};
};

inline ProviderPtr cachedProvider(ProviderPtr inner, std::shared_ptr<EmbeddingCache> cache) {
  return std::make_shared<CachedProvider>(std::move(inner), std::move(cache));
}

}  // namespace mined
