#pragma once

// Lower-is-better metric handles (WER, CER, EmbER, SemDist, table-backed),
// lattice node scoring and the empirical consistency probe.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mined/correction_set.hpp"
#include "mined/embeddings.hpp"
#include "mined/error.hpp"
#include "mined/textalign.hpp"

namespace mined {

enum class Orientation { LowerIsBetter, HigherIsBetter };

using TokenScorer = std::function<double(const TokenSeq& ref, const TokenSeq& cand)>;

/// Raw cost of one alignment column. A metric that provides one is
/// decomposable: its score is the sum of column costs over the unit-cost
/// alignment divided by max(1, reference length).
using ColumnCost = std::function<double(const AlignColumn&)>;

class MetricHandle {
 public:
  MetricHandle(std::string name, Orientation orientation, bool declaredConsistent, TokenScorer scorer,
               std::optional<Granularity> native = std::nullopt)
      : name_(std::move(name)),
        orientation_(orientation),
        consistent_(declaredConsistent),
        scorer_(std::move(scorer)),
        native_(native) {
    if (!scorer_) throw InvalidArgument("metric '" + name_ + "' has no scorer");
  }

  const std::string& name() const { return name_; }
  Orientation orientation() const { return orientation_; }
  bool declaredConsistent() const { return consistent_; }

  /// The granularity the scorer expects; inputs at another granularity are
  /// detokenized and retokenized. Empty means "whatever is passed in".
  std::optional<Granularity> nativeGranularity() const { return native_; }

  /// Granularity used when scoring raw text.
  Granularity textGranularity() const { return native_.value_or(Granularity::Word); }

  const NormalizationPolicy& normalization() const {
    return policy_ ? *policy_ : defaultPolicy(textGranularity());
  }

  MetricHandle& setNormalization(NormalizationPolicy p) {
    policy_ = p;
    return *this;
  }

  MetricHandle& setColumnCost(ColumnCost cost) {
    if (orientation_ != Orientation::LowerIsBetter) {
      throw InvalidArgument("only lower-is-better metrics can be decomposable");
    }
    columnCost_ = std::move(cost);
    return *this;
  }

  /// Strict metrics reject inputs at a non-native granularity instead of
  /// retokenizing them.
  MetricHandle& setStrictGranularity(bool strict) {
    strict_ = strict;
    return *this;
  }

  bool decomposable() const { return static_cast<bool>(columnCost_); }
  double columnCost(const AlignColumn& c) const { return columnCost_(c); }

  /// Lower-is-better score; higher-is-better raw scores s are exposed as 1 - s.
  double score(const TokenSeq& ref, const TokenSeq& cand) const {
    double raw = 0.0;
    if (native_ && (ref.granularity != *native_ || cand.granularity != *native_)) {
      if (strict_) {
        throw InvalidArgument("metric '" + name_ + "' only accepts " + std::string(toString(*native_)) +
                              "-level input");
      }
      raw = scorer_(retokenize(ref), retokenize(cand));
    } else {
      raw = scorer_(ref, cand);
    }
    return orientation_ == Orientation::HigherIsBetter ? 1.0 - raw : raw;
  }

  double scoreText(std::string_view ref, std::string_view cand) const {
    const Granularity g = textGranularity();
    return score(tokenize(ref, g, normalization()), tokenize(cand, g, normalization()));
  }

 private:
  static const NormalizationPolicy& defaultPolicy(Granularity g) {
    static const NormalizationPolicy word = NormalizationPolicy::forWord();
    static const NormalizationPolicy chr = NormalizationPolicy::forChar();
    return g == Granularity::Word ? word : chr;
  }

  TokenSeq retokenize(const TokenSeq& seq) const {
    if (seq.granularity == *native_) return seq;
    return tokenize(detokenize(seq), *native_, normalization());
  }

  std::string name_;
  Orientation orientation_;
  bool consistent_;
  TokenScorer scorer_;
  std::optional<Granularity> native_;
  std::optional<NormalizationPolicy> policy_;
  ColumnCost columnCost_;
  bool strict_ = false;
};

namespace detail {

inline double refDenominator(std::size_t refLength) {
  return static_cast<double>(std::max<std::size_t>(1, refLength));
}

inline double unitColumnCost(const AlignColumn& c) { return c.kind == EditKind::Match ? 0.0 : 1.0; }

inline double sumColumnCosts(const EditScript& script, const ColumnCost& cost) {
  double total = 0.0;
  for (std::size_t i = 0; i < script.errorCount(); ++i) total += cost(script.error(i));
  return total;
}

}  // namespace detail

/// Unit-cost edit distance divided by the reference length at granularity g.
/// An empty reference divides by 1.
inline MetricHandle errorRateMetric(Granularity g) {
  MetricHandle m(
      g == Granularity::Word ? "wer" : "cer", Orientation::LowerIsBetter, true,
      [](const TokenSeq& ref, const TokenSeq& cand) {
        return static_cast<double>(editDistance(ref, cand)) / detail::refDenominator(ref.size());
      },
      g);
  m.setColumnCost(detail::unitColumnCost);
  return m;
}

inline MetricHandle werMetric() { return errorRateMetric(Granularity::Word); }
inline MetricHandle cerMetric() { return errorRateMetric(Granularity::Char); }

inline double cosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw ScoringError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

struct EmberOptions {
  // Maps the cosine distance of a substituted word pair to its cost.
  std::function<double(double)> substitutionWeight = [](double d) { return std::clamp(d, 0.0, 1.0); };
};

/// WER whose substitutions cost the (clamped) cosine distance between the
/// two word vectors. Insertions, deletions and OOV substitutions cost 1.
inline MetricHandle emberMetric(std::shared_ptr<const WordVectorTable> vectors, EmberOptions opts = {}) {
  if (!vectors) throw InvalidArgument("EmbER needs a word vector table");
  auto cost = [vectors, weight = opts.substitutionWeight](const AlignColumn& c) -> double {
    switch (c.kind) {
      case EditKind::Match: return 0.0;
      case EditKind::Insertion:
      case EditKind::Deletion: return 1.0;
      case EditKind::Substitution: break;
    }
    const Vector* a = vectors->findNormalized(*c.ref);
    const Vector* b = vectors->findNormalized(*c.hyp);
    if (a == nullptr || b == nullptr) return 1.0;
    return weight(1.0 - cosineSimilarity(*a, *b));
  };
  MetricHandle m(
      "ember", Orientation::LowerIsBetter, true,
      [cost](const TokenSeq& ref, const TokenSeq& cand) {
        return detail::sumColumnCosts(align(ref, cand), cost) / detail::refDenominator(ref.size());
      },
      Granularity::Word);
  m.setNormalization(vectors->policy());
  m.setStrictGranularity(true);
  m.setColumnCost(cost);
  return m;
}

/// 1 - cosine(embed(ref), embed(cand)), in [0, 2]. Identical texts score 0
/// without a provider call; a zero embedding on either side scores 1.
inline MetricHandle semDistMetric(ProviderPtr provider) {
  if (!provider) throw InvalidArgument("SemDist needs an embedding provider");
  return MetricHandle("semdist", Orientation::LowerIsBetter, false,
                      [provider](const TokenSeq& ref, const TokenSeq& cand) {
                        std::string a = detokenize(ref);
                        std::string b = detokenize(cand);
                        if (a == b) return 0.0;
                        std::vector<std::string> texts{std::move(a), std::move(b)};
                        auto v = provider->embed(texts);
                        if (v.size() != 2) throw ScoringError("provider returned wrong batch size");
                        return 1.0 - cosineSimilarity(v[0], v[1]);
                      });
}

/// Fixture metric: score looked up by the realized candidate text.
inline MetricHandle tableMetric(std::map<std::string, double> table, double defaultScore,
                                bool declaredConsistent, std::string name = "table",
                                Granularity g = Granularity::Word) {
  const auto policy = NormalizationPolicy::defaultFor(g);
  std::map<std::string, double> normalized;
  for (auto& [text, value] : table) normalized.emplace(detokenize(tokenize(text, g, policy)), value);
  auto shared = std::make_shared<const std::map<std::string, double>>(std::move(normalized));
  MetricHandle m(std::move(name), Orientation::LowerIsBetter, declaredConsistent,
                 [shared, defaultScore](const TokenSeq&, const TokenSeq& cand) {
                   auto it = shared->find(detokenize(cand));
                   return it == shared->end() ? defaultScore : it->second;
                 });
  m.setNormalization(policy);
  return m;
}

/// Table metric from JSON: {"scores": {text: score, ...}, "default": x,
/// "consistent": bool, "name": str, "level": "word"|"char"}.
inline MetricHandle loadTableMetric(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table metric file " + path.string(), 0);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("table metric " + path.string() + ": " + e.what(), 0);
  }
  if (!doc.contains("scores") || !doc["scores"].is_object()) {
    throw ParseError("table metric " + path.string() + " lacks a \"scores\" object", 0);
  }
  const Granularity g = parseGranularity(doc.value("level", std::string("word")));
  std::map<std::string, double> scores;
  for (const auto& [text, value] : doc["scores"].items()) scores[text] = value.get<double>();
  return tableMetric(std::move(scores), doc.value("default", 1.0), doc.value("consistent", false),
                     doc.value("name", std::string("table")), g);
}

/// Scores lattice nodes of one script. Decomposable metrics at the script's
/// granularity are scored by summing the costs of the still-uncorrected
/// columns; everything else realizes the node and calls the metric.
class NodeScorer {
 public:
  NodeScorer(const EditScript& script, const MetricHandle& metric)
      : script_(&script), metric_(&metric), ref_(referenceOf(script)) {
    const auto native = metric.nativeGranularity();
    columnPath_ = metric.decomposable() && (!native || *native == script.granularity());
    if (columnPath_) {
      costs_.reserve(script.errorCount());
      for (std::size_t i = 0; i < script.errorCount(); ++i) costs_.push_back(metric.columnCost(script.error(i)));
    }
  }

  std::size_t errorCount() const { return script_->errorCount(); }
  std::size_t refLength() const { return script_->refLength(); }

  double score(const CorrectionSet& s) const {
    if (columnPath_) {
      checkCorrections(*script_, s);
      double total = 0.0;
      for (std::size_t i = 0; i < costs_.size(); ++i) {
        if (!s.contains(i)) total += costs_[i];
      }
      return total / detail::refDenominator(ref_.size());
    }
    return metric_->score(ref_, apply(*script_, s));
  }

  /// Realized text of the node; distinct sets with equal keys score equally.
  std::string key(const CorrectionSet& s) const { return detokenize(apply(*script_, s)); }

 private:
  const EditScript* script_;
  const MetricHandle* metric_;
  TokenSeq ref_;
  bool columnPath_ = false;
  std::vector<double> costs_;
};

template <class E>
concept NodeEvaluator = requires(const E& e, const CorrectionSet& s) {
  { e.errorCount() } -> std::convertible_to<std::size_t>;
  { e.refLength() } -> std::convertible_to<std::size_t>;
  { e.score(s) } -> std::convertible_to<double>;
  { e.key(s) } -> std::convertible_to<std::string>;
};

enum class Verdict { Consistent, Inconsistent, Undetermined };

inline std::string_view toString(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

struct InconsistencyWitness {
  std::size_t edit = 0;
  CorrectionSet contextA;
  CorrectionSet contextB;
  double gainA = 0.0;
  double gainB = 0.0;
};

struct ConsistencyVerdict {
  Verdict verdict = Verdict::Undetermined;
  double maxAdditivityGap = 0.0;
  std::size_t samplesTested = 0;
  std::optional<InconsistencyWitness> witness;
};

inline constexpr double kDefaultConsistencyTolerance = 1e-6;

/// Measures, for each edit i, how much its gain score(S) - score(S + i)
/// varies across contexts S. Exhaustive when n * 2^(n-1) <= sampleSubsets,
/// otherwise random (S, i) pairs drawn with the given seed.
template <NodeEvaluator E>
ConsistencyVerdict probeConsistency(const E& eval, std::size_t sampleSubsets,
                                    double tolerance = kDefaultConsistencyTolerance,
                                    std::uint64_t seed = 42) {
  const std::size_t n = eval.errorCount();
  if (n < 2) throw InvalidArgument("consistency probe needs at least 2 errors");

  std::unordered_map<CorrectionSet, double, CorrectionSetHash> memo;
  auto score = [&](const CorrectionSet& s) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    double v = eval.score(s);
    memo.emplace(s, v);
    return v;
  };

  struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    CorrectionSet loCtx, hiCtx;
    std::size_t contexts = 0;
  };
  std::vector<Range> ranges(n);
  ConsistencyVerdict out;

  auto observe = [&](const CorrectionSet& ctx, std::size_t i) {
    double gain = score(ctx) - score(ctx.with(i));
    auto& r = ranges[i];
    if (gain < r.lo) r.lo = gain, r.loCtx = ctx;
    if (gain > r.hi) r.hi = gain, r.hiCtx = ctx;
    ++r.contexts;
    ++out.samplesTested;
  };

  const bool exhaustive = n < 40 && (static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(n) - 1)) <=
                                        static_cast<double>(sampleSubsets);
  if (exhaustive) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      auto ctx = CorrectionSet::fromMask(mask);
      for (std::size_t i = 0; i < n; ++i) {
        if (!ctx.contains(i)) observe(ctx, i);
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pickEdit(0, n - 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < sampleSubsets; ++s) {
      std::size_t i = pickEdit(rng);
      CorrectionSet ctx;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && coin(rng)) ctx.insert(j);
      }
      observe(ctx, i);
    }
  }

  bool allCovered = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = ranges[i];
    if (r.contexts < 2) {
      allCovered = false;
      continue;
    }
    double gap = r.hi - r.lo;
    if (gap > out.maxAdditivityGap) {
      out.maxAdditivityGap = gap;
      if (gap > tolerance) out.witness = InconsistencyWitness{i, r.loCtx, r.hiCtx, r.lo, r.hi};
    }
  }
  if (out.witness) {
    out.verdict = Verdict::Inconsistent;
  } else {
    out.verdict = allCovered ? Verdict::Consistent : Verdict::Undetermined;
  }
  return out;
}

inline ConsistencyVerdict probeConsistency(const MetricHandle& metric, const EditScript& script,
                                           std::size_t sampleSubsets,
                                           double tolerance = kDefaultConsistencyTolerance,
                                           std::uint64_t seed = 42) {
  return probeConsistency(NodeScorer(script, metric), sampleSubsets, tolerance, seed);
}

}  // namespace mined
