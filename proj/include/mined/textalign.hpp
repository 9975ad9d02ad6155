#pragma once

// Tokenization, unit-cost Levenshtein alignment into a canonical edit
// script, and realization of correction subsets over that script.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mined/correction_set.hpp"
#include "mined/error.hpp"
#include "mined/unicode.hpp"

namespace mined {

enum class Granularity { Word, Char };

inline std::string_view toString(Granularity g) { return g == Granularity::Word ? "word" : "char"; }

inline Granularity parseGranularity(std::string_view s) {
  if (s == "word") return Granularity::Word;
  if (s == "char") return Granularity::Char;
  throw InvalidArgument("unknown granularity '" + std::string(s) + "' (expected word|char)");
}

struct NormalizationPolicy {
  bool lowercase = false;
  bool nfc = true;
  bool collapseWhitespace = false;
  // Punctuation code points become spaces. Off by default.
  bool stripPunctuation = false;

  static NormalizationPolicy forWord() { return {true, true, true, false}; }
  static NormalizationPolicy forChar() { return {false, true, false, false}; }
  static NormalizationPolicy defaultFor(Granularity g) {
    return g == Granularity::Word ? forWord() : forChar();
  }

  bool operator==(const NormalizationPolicy&) const = default;
};

inline std::string normalizeText(std::string_view text, const NormalizationPolicy& policy) {
  std::string s = policy.nfc ? unicode::nfc(text) : std::string(text);
  if (policy.lowercase) s = unicode::lowercase(s);
  if (policy.collapseWhitespace || policy.stripPunctuation) {
    s = unicode::collapseSpaces(s, policy.collapseWhitespace, policy.stripPunctuation);
  }
  if (policy.nfc && policy.lowercase) s = unicode::nfc(s);
  return s;
}

struct TokenSeq {
  std::vector<std::string> tokens;
  Granularity granularity = Granularity::Word;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }

  bool operator==(const TokenSeq&) const = default;
};

inline TokenSeq tokenize(std::string_view text, Granularity g, const NormalizationPolicy& policy) {
  std::string norm = normalizeText(text, policy);
  TokenSeq out;
  out.granularity = g;
  out.tokens = g == Granularity::Word ? unicode::splitWhitespace(norm) : unicode::graphemes(norm);
  return out;
}

inline TokenSeq tokenize(std::string_view text, Granularity g) {
  return tokenize(text, g, NormalizationPolicy::defaultFor(g));
}

/// Inverse of tokenize for already-normalized tokens: words joined by a
/// single space, characters concatenated.
inline std::string detokenize(std::span<const std::string> tokens, Granularity g) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (g == Granularity::Word && i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

inline std::string detokenize(const TokenSeq& seq) { return detokenize(seq.tokens, seq.granularity); }

enum class EditKind { Match, Substitution, Insertion, Deletion };

inline std::string_view toString(EditKind k) {
  switch (k) {
    case EditKind::Match: return "match";
    case EditKind::Substitution: return "substitution";
    case EditKind::Insertion: return "insertion";
    case EditKind::Deletion: return "deletion";
  }
  return "?";
}

struct AlignColumn {
  std::optional<std::string> ref;
  std::optional<std::string> hyp;
  EditKind kind = EditKind::Match;

  bool operator==(const AlignColumn&) const = default;
};

class EditScript {
 public:
  EditScript() = default;

  /// Builds a script from explicit columns, checking the per-column
  /// invariants. align() is the usual way to obtain one.
  EditScript(std::vector<AlignColumn> columns, Granularity g)
      : columns_(std::move(columns)), granularity_(g) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const auto& c = columns_[i];
      bool ok = false;
      switch (c.kind) {
        case EditKind::Match: ok = c.ref && c.hyp && *c.ref == *c.hyp; break;
        case EditKind::Substitution: ok = c.ref && c.hyp && *c.ref != *c.hyp; break;
        case EditKind::Insertion: ok = !c.ref && c.hyp; break;
        case EditKind::Deletion: ok = c.ref && !c.hyp; break;
      }
      if (!ok) throw InvalidArgument("alignment column " + std::to_string(i) + " violates its kind");
      if (c.kind != EditKind::Match) errorIndices_.push_back(i);
      if (c.ref) ++refLength_;
      if (c.hyp) ++hypLength_;
    }
  }

  const std::vector<AlignColumn>& columns() const { return columns_; }
  const std::vector<std::size_t>& errorIndices() const { return errorIndices_; }
  Granularity granularity() const { return granularity_; }
  std::size_t refLength() const { return refLength_; }
  std::size_t hypLength() const { return hypLength_; }
  std::size_t errorCount() const { return errorIndices_.size(); }

  /// Column of the i-th error.
  const AlignColumn& error(std::size_t i) const { return columns_.at(errorIndices_.at(i)); }

  /// Position within errorIndices of a column, if that column is an error.
  std::optional<std::size_t> errorPosition(std::size_t column) const {
    auto it = std::lower_bound(errorIndices_.begin(), errorIndices_.end(), column);
    if (it == errorIndices_.end() || *it != column) return std::nullopt;
    return static_cast<std::size_t>(it - errorIndices_.begin());
  }

 private:
  std::vector<AlignColumn> columns_;
  std::vector<std::size_t> errorIndices_;
  Granularity granularity_ = Granularity::Word;
  std::size_t refLength_ = 0;
  std::size_t hypLength_ = 0;
};

namespace detail {

// Maps tokens of both sequences onto shared integer ids so the DP compares ints.
inline void internTokens(const TokenSeq& a, const TokenSeq& b, std::vector<std::uint32_t>& ia,
                         std::vector<std::uint32_t>& ib) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto id = [&](const std::string& t) {
    auto [it, inserted] = ids.try_emplace(t, static_cast<std::uint32_t>(ids.size()));
    return it->second;
  };
  ia.clear();
  ib.clear();
  for (const auto& t : a.tokens) ia.push_back(id(t));
  for (const auto& t : b.tokens) ib.push_back(id(t));
}

}  // namespace detail

/// Unit-cost Levenshtein distance, two-row DP.
inline std::size_t editDistance(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::uint32_t> ia, ib;
  detail::internTokens(a, b, ia, ib);
  std::vector<std::size_t> prev(ib.size() + 1), cur(ib.size() + 1);
  for (std::size_t j = 0; j <= ib.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ia.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ib.size(); ++j) {
      std::size_t sub = prev[j - 1] + (ia[i - 1] == ib[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[ib.size()];
}

/// Minimal unit-cost alignment. The backtrace runs from the end of both
/// sequences and prefers Match > Substitution > Deletion > Insertion.
inline EditScript align(const TokenSeq& ref, const TokenSeq& hyp) {
  if (ref.granularity != hyp.granularity) {
    throw InvalidArgument("cannot align token sequences of different granularity");
  }
  std::vector<std::uint32_t> r, h;
  detail::internTokens(ref, hyp, r, h);
  const std::size_t m = r.size();
  const std::size_t n = h.size();
  const std::size_t w = n + 1;
  std::vector<std::uint32_t> d((m + 1) * w);
  for (std::size_t j = 0; j <= n; ++j) d[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    d[i * w] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      std::uint32_t sub = d[(i - 1) * w + j - 1] + (r[i - 1] == h[j - 1] ? 0U : 1U);
      d[i * w + j] = std::min({sub, d[(i - 1) * w + j] + 1U, d[i * w + j - 1] + 1U});
    }
  }

  std::vector<AlignColumn> cols;
  cols.reserve(m + n);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    const std::uint32_t here = d[i * w + j];
    if (i > 0 && j > 0) {
      const std::uint32_t diag = d[(i - 1) * w + j - 1];
      if (r[i - 1] == h[j - 1] && diag == here) {
        cols.push_back({ref[i - 1], hyp[j - 1], EditKind::Match});
        --i, --j;
        continue;
      }
      if (r[i - 1] != h[j - 1] && diag + 1 == here) {
        cols.push_back({ref[i - 1], hyp[j - 1], EditKind::Substitution});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
      cols.push_back({ref[i - 1], std::nullopt, EditKind::Deletion});
      --i;
      continue;
    }
    cols.push_back({std::nullopt, hyp[j - 1], EditKind::Insertion});
    --j;
  }
  std::reverse(cols.begin(), cols.end());
  return EditScript(std::move(cols), ref.granularity);
}

inline std::size_t errorCount(const EditScript& script) { return script.errorCount(); }

inline void checkCorrections(const EditScript& script, const CorrectionSet& corrections) {
  if (corrections.span() > script.errorCount()) {
    throw InvalidArgument("correction position " + std::to_string(corrections.span() - 1) +
                          " out of range for " + std::to_string(script.errorCount()) + " errors");
  }
}

/// Realizes a lattice node: corrected columns take their reference side,
/// all others keep the hypothesis side, in column order.
inline TokenSeq apply(const EditScript& script, const CorrectionSet& corrections) {
  checkCorrections(script, corrections);
  TokenSeq out;
  out.granularity = script.granularity();
  const auto& cols = script.columns();
  std::size_t nextErr = 0;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& col = cols[c];
    const std::optional<std::string>* side = &col.hyp;
    if (col.kind != EditKind::Match) {
      if (corrections.contains(nextErr)) side = &col.ref;
      ++nextErr;
    }
    if (*side) out.tokens.push_back(**side);
  }
  return out;
}

/// Reference side of the script (equals apply with every error corrected).
inline TokenSeq referenceOf(const EditScript& script) {
  TokenSeq out;
  out.granularity = script.granularity();
  for (const auto& c : script.columns()) {
    if (c.ref) out.tokens.push_back(*c.ref);
  }
  return out;
}

}  // namespace mined
