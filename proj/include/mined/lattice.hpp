#pragma once

// Search of the power-set correction lattice for the smallest number of
// corrections that brings a metric score to or below a threshold.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mined/correction_set.hpp"
#include "mined/error.hpp"
#include "mined/metrics.hpp"
#include "mined/textalign.hpp"

namespace mined {

enum class Strategy { Exact, ConsistentFast, Beam };

inline std::string_view toString(Strategy s) {
  switch (s) {
    case Strategy::Exact: return "exact";
    case Strategy::ConsistentFast: return "consistent-fast";
    case Strategy::Beam: return "beam";
  }
  return "?";
}

struct SearchConfig {
  double threshold = 0.0;  // lower-is-better acceptability bound
  std::size_t exactCap = 16;
  std::size_t beamWidth = 64;
  bool verifyConsistency = false;
  bool memoize = true;
  std::size_t probeSamples = 512;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(threshold >= 0.0)) throw InvalidArgument("threshold must be >= 0");
    if (exactCap < 1) throw InvalidArgument("exactCap must be >= 1");
    if (beamWidth < 1) throw InvalidArgument("beamWidth must be >= 1");
  }
};

struct MinEdResult {
  std::size_t editsNeeded = 0;
  double rate = 0.0;  // editsNeeded / max(1, reference length)
  double residualScore = 0.0;
  std::size_t nodesEvaluated = 0;
  Strategy strategy = Strategy::Exact;
  bool acceptable = false;
  CorrectionSet corrections;
};

// Scores within this distance above the threshold still count as acceptable,
// so that sums of per-edit gains and direct node scores agree at the boundary.
inline constexpr double kAcceptSlack = 1e-12;

inline bool isAcceptable(double score, double threshold) { return score <= threshold + kAcceptSlack; }

/// Number of lattice nodes at level k for n errors, or 2^n for the whole
/// lattice. Requires k <= n <= 62.
inline std::uint64_t latticeNodeCount(std::size_t n, std::optional<std::size_t> k = std::nullopt) {
  if (n > 62) throw InvalidArgument("latticeNodeCount supports n <= 62");
  if (!k) return std::uint64_t{1} << n;
  if (*k > n) throw InvalidArgument("level k exceeds error count n");
  std::size_t kk = std::min(*k, n - *k);
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= kk; ++i) c = c * (n - kk + i) / i;
  return static_cast<std::uint64_t>(c);
}

/// Best score found at each lattice level, as produced by one strategy.
/// levelBest may stop early when a search ran with a stopping threshold.
struct LatticeProfile {
  Strategy strategy = Strategy::Exact;
  std::size_t errorCount = 0;
  std::size_t refLength = 0;
  std::vector<double> levelBest;
  std::vector<CorrectionSet> levelArgBest;
  std::size_t nodesEvaluated = 0;

  bool complete() const { return levelBest.size() == errorCount + 1; }

  MinEdResult resolve(double threshold) const {
    MinEdResult r;
    r.strategy = strategy;
    r.nodesEvaluated = nodesEvaluated;
    for (std::size_t k = 0; k < levelBest.size(); ++k) {
      if (isAcceptable(levelBest[k], threshold)) {
        r.editsNeeded = k;
        r.residualScore = levelBest[k];
        r.corrections = levelArgBest[k];
        r.acceptable = true;
        r.rate = static_cast<double>(k) / detail::refDenominator(refLength);
        return r;
      }
    }
    if (!complete()) throw Error("lattice profile is incomplete for this threshold");
    r.editsNeeded = errorCount;
    r.residualScore = levelBest.back();
    r.corrections = levelArgBest.back();
    r.acceptable = false;
    r.rate = static_cast<double>(errorCount) / detail::refDenominator(refLength);
    return r;
  }
};

namespace detail {

template <NodeEvaluator E>
class MemoScorer {
 public:
  MemoScorer(const E& eval, bool memoize) : eval_(eval), memoize_(memoize) {}

  double operator()(const CorrectionSet& s) {
    if (!memoize_) {
      ++calls_;
      return eval_.score(s);
    }
    std::string key = eval_.key(s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    ++calls_;
    double v = eval_.score(s);
    memo_.emplace(std::move(key), v);
    return v;
  }

  std::size_t calls() const { return calls_; }

 private:
  const E& eval_;
  bool memoize_;
  std::size_t calls_ = 0;
  std::unordered_map<std::string, double> memo_;
};

}  // namespace detail

/// Exhaustive level-order enumeration. With a stopping threshold the search
/// ends at the first level holding an acceptable node; that level is still
/// fully scored so the reported node is the best one there.
template <NodeEvaluator E>
LatticeProfile exactProfile(const E& eval, const SearchConfig& cfg,
                            std::optional<double> stopThreshold = std::nullopt) {
  const std::size_t n = eval.errorCount();
  if (n > cfg.exactCap || n > 62) {
    throw InvalidArgument("exact search over " + std::to_string(n) + " errors exceeds exactCap " +
                          std::to_string(cfg.exactCap) + "; use beam search");
  }
  LatticeProfile p;
  p.strategy = Strategy::Exact;
  p.errorCount = n;
  p.refLength = eval.refLength();
  detail::MemoScorer<E> score(eval, cfg.memoize);

  for (std::size_t k = 0; k <= n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t bestMask = 0;
    // Gosper's hack walks the k-subsets of n bits in increasing mask order.
    std::uint64_t mask = k == 0 ? 0 : (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (mask < limit) {
      double s = score(CorrectionSet::fromMask(mask));
      if (s < best) best = s, bestMask = mask;
      if (mask == 0) break;
      std::uint64_t low = mask & (~mask + 1);
      std::uint64_t ripple = mask + low;
      mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    p.levelBest.push_back(best);
    p.levelArgBest.push_back(CorrectionSet::fromMask(bestMask));
    if (stopThreshold && isAcceptable(best, *stopThreshold)) break;
  }
  p.nodesEvaluated = score.calls();
  return p;
}

/// Additive shortcut for consistent metrics: one score for the hypothesis,
/// one per single correction (n + 1 calls). Level k is predicted as the base
/// score minus the k largest single-edit gains; ties go to the lower column.
template <NodeEvaluator E>
LatticeProfile consistentFastProfile(const E& eval) {
  const std::size_t n = eval.errorCount();
  LatticeProfile p;
  p.strategy = Strategy::ConsistentFast;
  p.errorCount = n;
  p.refLength = eval.refLength();

  const double base = eval.score(CorrectionSet{});
  std::vector<double> gains(n);
  for (std::size_t i = 0; i < n; ++i) gains[i] = base - eval.score(CorrectionSet{i});
  p.nodesEvaluated = n + 1;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

  double residual = base;
  CorrectionSet chosen;
  p.levelBest.push_back(residual);
  p.levelArgBest.push_back(chosen);
  for (std::size_t i : order) {
    residual -= gains[i];
    chosen.insert(i);
    p.levelBest.push_back(residual);
    p.levelArgBest.push_back(chosen);
  }
  return p;
}

/// Level-order beam: each level keeps the beamWidth lowest-scoring nodes
/// (ties by position order) and expands them by one more correction. The
/// first acceptable level is an upper bound on the exact answer.
template <NodeEvaluator E>
LatticeProfile beamProfile(const E& eval, const SearchConfig& cfg,
                           std::optional<double> stopThreshold = std::nullopt) {
  const std::size_t n = eval.errorCount();
  LatticeProfile p;
  p.strategy = Strategy::Beam;
  p.errorCount = n;
  p.refLength = eval.refLength();
  detail::MemoScorer<E> score(eval, cfg.memoize);

  std::vector<std::pair<double, CorrectionSet>> frontier{{score(CorrectionSet{}), CorrectionSet{}}};
  p.levelBest.push_back(frontier.front().first);
  p.levelArgBest.push_back(frontier.front().second);
  bool stop = stopThreshold && isAcceptable(frontier.front().first, *stopThreshold);

  for (std::size_t k = 1; k <= n && !stop; ++k) {
    std::unordered_set<CorrectionSet, CorrectionSetHash> seen;
    std::vector<std::pair<double, CorrectionSet>> next;
    for (const auto& [parentScore, parent] : frontier) {
      for (std::size_t i = 0; i < n; ++i) {
        if (parent.contains(i)) continue;
        CorrectionSet child = parent.with(i);
        if (!seen.insert(child).second) continue;
        double s = score(child);
        next.emplace_back(s, std::move(child));
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    if (next.size() > cfg.beamWidth) next.resize(cfg.beamWidth);
    frontier = std::move(next);
    p.levelBest.push_back(frontier.front().first);
    p.levelArgBest.push_back(frontier.front().second);
    stop = stopThreshold && isAcceptable(frontier.front().first, *stopThreshold);
  }
  p.nodesEvaluated = score.calls();
  return p;
}

template <NodeEvaluator E>
MinEdResult minEditsExact(const E& eval, const SearchConfig& cfg) {
  cfg.validate();
  return exactProfile(eval, cfg, cfg.threshold).resolve(cfg.threshold);
}

template <NodeEvaluator E>
MinEdResult minEditsConsistentFast(const E& eval, const SearchConfig& cfg) {
  cfg.validate();
  return consistentFastProfile(eval).resolve(cfg.threshold);
}

template <NodeEvaluator E>
MinEdResult minEditsBeam(const E& eval, const SearchConfig& cfg) {
  cfg.validate();
  return beamProfile(eval, cfg, cfg.threshold).resolve(cfg.threshold);
}

inline MinEdResult minEditsExact(const EditScript& script, const MetricHandle& metric, const SearchConfig& cfg) {
  return minEditsExact(NodeScorer(script, metric), cfg);
}

inline MinEdResult minEditsConsistentFast(const EditScript& script, const MetricHandle& metric,
                                          const SearchConfig& cfg) {
  if (!metric.declaredConsistent()) {
    throw InvalidArgument("metric '" + metric.name() + "' is not declared consistent");
  }
  return minEditsConsistentFast(NodeScorer(script, metric), cfg);
}

inline MinEdResult minEditsBeam(const EditScript& script, const MetricHandle& metric, const SearchConfig& cfg) {
  return minEditsBeam(NodeScorer(script, metric), cfg);
}

/// Strategy used by minEdits: the fast path for metrics declared consistent
/// (unless an enabled probe finds them inconsistent on this script), exact
/// search up to exactCap errors, beam search beyond.
template <NodeEvaluator E>
Strategy chooseStrategy(const E& eval, bool declaredConsistent, const SearchConfig& cfg) {
  const std::size_t n = eval.errorCount();
  if (declaredConsistent) {
    if (!cfg.verifyConsistency || n < 2) return Strategy::ConsistentFast;
    auto verdict = probeConsistency(eval, cfg.probeSamples, kDefaultConsistencyTolerance, cfg.seed);
    if (verdict.verdict != Verdict::Inconsistent) return Strategy::ConsistentFast;
    warn("metric declared consistent but probe found additivity gap " +
         std::to_string(verdict.maxAdditivityGap) + "; falling back to lattice search");
  }
  return n <= std::min<std::size_t>(cfg.exactCap, 62) ? Strategy::Exact : Strategy::Beam;
}

template <NodeEvaluator E>
LatticeProfile latticeProfile(const E& eval, bool declaredConsistent, const SearchConfig& cfg,
                              std::optional<double> stopThreshold = std::nullopt) {
  switch (chooseStrategy(eval, declaredConsistent, cfg)) {
    case Strategy::ConsistentFast: return consistentFastProfile(eval);
    case Strategy::Exact: return exactProfile(eval, cfg, stopThreshold);
    case Strategy::Beam: return beamProfile(eval, cfg, stopThreshold);
  }
  throw Error("unreachable strategy");
}

inline LatticeProfile latticeProfile(const EditScript& script, const MetricHandle& metric, const SearchConfig& cfg) {
  return latticeProfile(NodeScorer(script, metric), metric.declaredConsistent(), cfg);
}

inline MinEdResult minEdits(const EditScript& script, const MetricHandle& metric, const SearchConfig& cfg) {
  cfg.validate();
  NodeScorer eval(script, metric);
  return latticeProfile(eval, metric.declaredConsistent(), cfg, cfg.threshold).resolve(cfg.threshold);
}

/// minED of raw texts at granularity g; both sides are normalized with
/// policy, or the default policy for g.
inline MinEdResult minEdits(std::string_view ref, std::string_view hyp, Granularity g, const MetricHandle& metric,
                            const SearchConfig& cfg,
                            const std::optional<NormalizationPolicy>& policy = std::nullopt) {
  const auto norm = policy.value_or(NormalizationPolicy::defaultFor(g));
  auto script = align(tokenize(ref, g, norm), tokenize(hyp, g, norm));
  return minEdits(script, metric, cfg);
}

/// A metric whose score is the minED rate of the incorporated metric at
/// threshold theta; this is what minWED / minCED compare across hypotheses.
inline MetricHandle minEdMetric(MetricHandle incorporated, Granularity g, SearchConfig cfg) {
  cfg.validate();
  std::string name = std::string(g == Granularity::Word ? "minWED(" : "minCED(") + incorporated.name() +
                     ",theta=" + std::to_string(cfg.threshold) + ")";
  auto policy = NormalizationPolicy::defaultFor(g);
  auto inner = std::make_shared<const MetricHandle>(std::move(incorporated));
  MetricHandle m(
      std::move(name), Orientation::LowerIsBetter, false,
      [inner, cfg](const TokenSeq& ref, const TokenSeq& cand) { return minEdits(align(ref, cand), *inner, cfg).rate; },
      g);
  m.setNormalization(policy);
  return m;
}

}  // namespace mined
