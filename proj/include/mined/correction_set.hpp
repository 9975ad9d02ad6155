#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace mined {

/// A subset of the error positions of an edit script: one node of the
/// correction lattice. Bit i refers to the i-th error column, not to a raw
/// column index. Storage widens in 64-bit words, so any error count fits.
class CorrectionSet {
 public:
  CorrectionSet() = default;
  CorrectionSet(std::initializer_list<std::size_t> positions) {
    for (std::size_t p : positions) insert(p);
  }

  static CorrectionSet fromMask(std::uint64_t mask) {
    CorrectionSet s;
    if (mask != 0) s.words_.push_back(mask);
    return s;
  }

  static CorrectionSet full(std::size_t n) {
    CorrectionSet s;
    s.words_.assign((n + 63) / 64, ~std::uint64_t{0});
    if (n % 64 != 0) s.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
    return s;
  }

  void insert(std::size_t pos) {
    std::size_t w = pos / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (pos % 64);
  }

  void erase(std::size_t pos) {
    std::size_t w = pos / 64;
    if (w >= words_.size()) return;
    words_[w] &= ~(std::uint64_t{1} << (pos % 64));
    trim();
  }

  bool contains(std::size_t pos) const {
    std::size_t w = pos / 64;
    return w < words_.size() && ((words_[w] >> (pos % 64)) & 1U) != 0;
  }

  CorrectionSet with(std::size_t pos) const {
    CorrectionSet s = *this;
    s.insert(pos);
    return s;
  }

  bool empty() const { return words_.empty(); }

  /// Cardinality, i.e. the lattice level of this node.
  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// One past the highest set position; 0 for the empty set.
  std::size_t span() const {
    if (words_.empty()) return 0;
    return (words_.size() - 1) * 64 + (64 - static_cast<std::size_t>(std::countl_zero(words_.back())));
  }

  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  bool isSubsetOf(const CorrectionSet& other) const {
    if (words_.size() > other.words_.size()) return false;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if ((words_[w] & ~other.words_[w]) != 0) return false;
    }
    return true;
  }

  bool operator==(const CorrectionSet&) const = default;

  // Lexicographic on ascending position lists; used for deterministic ties.
  std::strong_ordering operator<=>(const CorrectionSet& other) const {
    auto a = positions();
    auto b = other.positions();
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  void trim() {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
  }

  std::vector<std::uint64_t> words_;
};

struct CorrectionSetHash {
  std::size_t operator()(const CorrectionSet& s) const { return s.hash(); }
};

}  // namespace mined
