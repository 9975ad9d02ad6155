#pragma once

// Side-by-side human preference datasets, metric/human agreement and
// threshold calibration for minED metrics.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mined/error.hpp"
#include "mined/lattice.hpp"
#include "mined/metrics.hpp"
#include "mined/parallel.hpp"

namespace mined {

struct SideBySideItem {
  std::string id;  // "id" field when present, else the 1-based line number
  std::string reference;
  std::string hypA;
  std::string hypB;
  int votesA = 0;
  int votesB = 0;

  int totalVotes() const { return votesA + votesB; }
  bool hasMajority() const { return votesA != votesB; }
  bool majorityIsA() const { return votesA > votesB; }
};

/// JSON Lines, one object per item with reference, hypA, hypB, votesA, votesB.
inline std::vector<SideBySideItem> loadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path.string(), 0);
  std::vector<SideBySideItem> items;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineNo);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", lineNo);
    auto text = [&](const char* field) {
      if (!obj.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"", lineNo);
      if (!obj[field].is_string()) throw ParseError(std::string("field \"") + field + "\" must be a string", lineNo);
      auto s = obj[field].get<std::string>();
      if (s.empty()) throw ParseError(std::string("field \"") + field + "\" is empty", lineNo);
      return s;
    };
    auto votes = [&](const char* field) {
      if (!obj.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"", lineNo);
      const auto& v = obj[field];
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(std::string("field \"") + field + "\" must be a non-negative integer", lineNo);
      }
      return v.get<int>();
    };
    SideBySideItem item;
    item.reference = text("reference");
    item.hypA = text("hypA");
    item.hypB = text("hypB");
    item.votesA = votes("votesA");
    item.votesB = votes("votesB");
    if (item.totalVotes() < 1) throw ParseError("item has no votes", lineNo);
    if (obj.contains("id")) {
      const auto& id = obj["id"];
      item.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
      item.id = std::to_string(lineNo);
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) warn("dataset " + path.string() + " contains no items");
  return items;
}

struct AgreementFilter {
  double minAgreement = 1.0;

  explicit AgreementFilter(double tau = 1.0) : minAgreement(tau) {
    if (!(tau >= 0.5 && tau <= 1.0)) throw InvalidArgument("agreement threshold must lie in [0.5, 1.0]");
  }

  double agreement(const SideBySideItem& item) const {
    return static_cast<double>(std::max(item.votesA, item.votesB)) / static_cast<double>(item.totalVotes());
  }

  bool passes(const SideBySideItem& item) const { return agreement(item) + 1e-12 >= minAgreement; }

  std::vector<SideBySideItem> apply(const std::vector<SideBySideItem>& items) const {
    std::vector<SideBySideItem> out;
    for (const auto& it : items) {
      if (passes(it)) out.push_back(it);
    }
    return out;
  }
};

enum class Judgment { Correct, Equal, Incorrect };

inline std::string_view toString(Judgment j) {
  switch (j) {
    case Judgment::Correct: return "correct";
    case Judgment::Equal: return "equal";
    case Judgment::Incorrect: return "incorrect";
  }
  return "?";
}

inline constexpr double kDefaultTieEps = 1e-9;

/// Compares two lower-is-better scores against the human majority.
inline Judgment judgeScores(double scoreA, double scoreB, bool humansPreferA, double tieEps) {
  if (std::abs(scoreA - scoreB) <= tieEps) return Judgment::Equal;
  return (scoreA < scoreB) == humansPreferA ? Judgment::Correct : Judgment::Incorrect;
}

inline Judgment judge(const MetricHandle& metric, const SideBySideItem& item, double tieEps = kDefaultTieEps) {
  if (!item.hasMajority()) throw InvalidArgument("item " + item.id + " has no majority vote");
  return judgeScores(metric.scoreText(item.reference, item.hypA), metric.scoreText(item.reference, item.hypB),
                     item.majorityIsA(), tieEps);
}

struct CorrelationReport {
  std::string metricName;
  double tau = 1.0;
  std::size_t correct = 0;
  std::size_t equal = 0;
  std::size_t incorrect = 0;

  std::size_t total() const { return correct + equal + incorrect; }
  /// Equal outcomes count in the denominator only.
  double headlineRate() const { return total() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total()); }

  void add(Judgment j) {
    switch (j) {
      case Judgment::Correct: ++correct; break;
      case Judgment::Equal: ++equal; break;
      case Judgment::Incorrect: ++incorrect; break;
    }
  }
};

/// Items passing the filter that also have a strict majority; a 50/50 split
/// passes tau = 0.5 but has no human winner to compare against.
inline std::vector<SideBySideItem> judgeableItems(const std::vector<SideBySideItem>& items,
                                                  const AgreementFilter& filter) {
  std::vector<SideBySideItem> out;
  std::size_t ties = 0;
  for (const auto& it : items) {
    if (!filter.passes(it)) continue;
    if (!it.hasMajority()) {
      ++ties;
      continue;
    }
    out.push_back(it);
  }
  if (ties > 0) warn(std::to_string(ties) + " items without a majority vote were skipped");
  if (out.empty()) {
    throw InvalidArgument("no items left after agreement filter tau=" + std::to_string(filter.minAgreement));
  }
  return out;
}

inline std::vector<Judgment> judgeAll(const MetricHandle& metric, const std::vector<SideBySideItem>& items,
                                      double tieEps, std::size_t jobs) {
  std::vector<Judgment> out(items.size());
  parallelFor(items.size(), jobs, [&](std::size_t i) { out[i] = judge(metric, items[i], tieEps); });
  return out;
}

inline CorrelationReport correlate(const MetricHandle& metric, const std::vector<SideBySideItem>& items,
                                   const AgreementFilter& filter, double tieEps = kDefaultTieEps,
                                   std::size_t jobs = 1) {
  auto kept = judgeableItems(items, filter);
  CorrelationReport r;
  r.metricName = metric.name();
  r.tau = filter.minAgreement;
  for (auto j : judgeAll(metric, kept, tieEps, jobs)) r.add(j);
  return r;
}

struct CalibrationRow {
  double theta = 0.0;
  CorrelationReport report;
};

struct CalibrationCurve {
  std::vector<CalibrationRow> rows;
  double argmaxTheta = 0.0;

  /// Smallest theta attaining the best headline rate.
  void updateArgmax() {
    if (rows.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].report.headlineRate() > rows[best].report.headlineRate()) best = i;
    }
    argmaxTheta = rows[best].theta;
  }

  const CalibrationRow* rowFor(double theta) const {
    for (const auto& r : rows) {
      if (r.theta == theta) return &r;
    }
    return nullptr;
  }
};

inline void checkGrid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("calibration grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw InvalidArgument("calibration grid values must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("calibration grid must be strictly increasing");
  }
}

inline std::vector<double> logGrid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw InvalidArgument("log grid needs 0 < lo < hi and count >= 2");
  std::vector<double> g(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

using MinEdFamily = std::function<MetricHandle(double theta)>;

/// Generic calibration: one correlation report per grid threshold.
inline CalibrationCurve calibrate(const MinEdFamily& family, const std::vector<double>& grid,
                                  const std::vector<SideBySideItem>& items, const AgreementFilter& filter,
                                  double tieEps = kDefaultTieEps, std::size_t jobs = 1) {
  checkGrid(grid);
  auto kept = judgeableItems(items, filter);
  CalibrationCurve curve;
  for (double theta : grid) {
    try {
      auto metric = family(theta);
      CalibrationRow row{theta, {}};
      row.report.metricName = metric.name();
      row.report.tau = filter.minAgreement;
      for (auto j : judgeAll(metric, kept, tieEps, jobs)) row.report.add(j);
      curve.rows.push_back(std::move(row));
    } catch (const ScoringError& e) {
      throw ScoringError("calibration failed at theta=" + std::to_string(theta) + ": " + e.what());
    }
  }
  curve.updateArgmax();
  return curve;
}

/// Precomputed lattice profiles for both hypotheses of every judgeable item.
/// Each profile is θ-independent, so one search answers minED at every
/// threshold on a grid.
class MinEdProfiles {
 public:
  MinEdProfiles(const MetricHandle& incorporated, Granularity g, const SearchConfig& cfg,
                const std::vector<SideBySideItem>& items, std::size_t jobs)
      : items_(items) {
    const auto policy = NormalizationPolicy::defaultFor(g);
    profilesA_.resize(items_.size());
    profilesB_.resize(items_.size());
    parallelFor(items_.size(), jobs, [&](std::size_t i) {
      auto ref = tokenize(items_[i].reference, g, policy);
      auto a = align(ref, tokenize(items_[i].hypA, g, policy));
      auto b = align(ref, tokenize(items_[i].hypB, g, policy));
      profilesA_[i] = latticeProfile(a, incorporated, cfg);
      profilesB_[i] = latticeProfile(b, incorporated, cfg);
    });
  }

  const std::vector<SideBySideItem>& items() const { return items_; }

  CorrelationReport reportAt(double theta, double tieEps, const std::string& name, double tau) const {
    CorrelationReport r;
    r.metricName = name;
    r.tau = tau;
    for (std::size_t i = 0; i < items_.size(); ++i) r.add(judgeAt(i, theta, tieEps));
    return r;
  }

  Judgment judgeAt(std::size_t i, double theta, double tieEps) const {
    return judgeScores(profilesA_[i].resolve(theta).rate, profilesB_[i].resolve(theta).rate,
                       items_[i].majorityIsA(), tieEps);
  }

 private:
  std::vector<SideBySideItem> items_;
  std::vector<LatticeProfile> profilesA_;
  std::vector<LatticeProfile> profilesB_;
};

/// Calibration of minWED / minCED over an incorporated metric. Equivalent to
/// calibrate() with the minEdMetric family, but searches each lattice once.
inline CalibrationCurve calibrateMinEd(const MetricHandle& incorporated, Granularity g,
                                       const std::vector<double>& grid, const std::vector<SideBySideItem>& items,
                                       const AgreementFilter& filter, const SearchConfig& cfg = {},
                                       double tieEps = kDefaultTieEps, std::size_t jobs = 1) {
  checkGrid(grid);
  auto kept = judgeableItems(items, filter);
  std::optional<MinEdProfiles> profiles;
  try {
    profiles.emplace(incorporated, g, cfg, kept, jobs);
  } catch (const ScoringError& e) {
    throw ScoringError("calibration failed while searching lattices (theta grid from " + std::to_string(grid.front()) +
                       "): " + e.what());
  }
  const std::string prefix = g == Granularity::Word ? "minWED(" : "minCED(";
  CalibrationCurve curve;
  for (double theta : grid) {
    curve.rows.push_back({theta, profiles->reportAt(theta, tieEps, prefix + incorporated.name() + ")",
                                                    filter.minAgreement)});
  }
  curve.updateArgmax();
  return curve;
}

/// Adds `points` log-spaced thresholds strictly between the neighbours of the
/// current argmax, merges them into the curve and recomputes the argmax.
inline std::vector<double> refinementGrid(const CalibrationCurve& curve, std::size_t points = 10) {
  std::vector<double> thetas;
  for (const auto& r : curve.rows) thetas.push_back(r.theta);
  auto it = std::find(thetas.begin(), thetas.end(), curve.argmaxTheta);
  if (it == thetas.end() || thetas.size() < 2) return {};
  std::size_t i = static_cast<std::size_t>(it - thetas.begin());
  double lo = thetas[i == 0 ? 0 : i - 1];
  double hi = thetas[std::min(i + 1, thetas.size() - 1)];
  std::vector<double> out;
  if (lo <= 0.0) lo = hi / 1e3;
  for (std::size_t p = 1; p <= points; ++p) {
    double t = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(p) / static_cast<double>(points + 1));
    if (std::find(thetas.begin(), thetas.end(), t) == thetas.end()) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline void mergeCurve(CalibrationCurve& into, const CalibrationCurve& extra) {
  for (const auto& r : extra.rows) {
    if (!into.rowFor(r.theta)) into.rows.push_back(r);
  }
  std::sort(into.rows.begin(), into.rows.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  into.updateArgmax();
}

inline std::string formatNumber(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline void writeCorrelationCsv(std::ostream& out, const std::vector<CorrelationReport>& reports) {
  out << "metric,tau,correct,equal,incorrect,headline\n";
  for (const auto& r : reports) {
    out << r.metricName << ',' << formatNumber(r.tau) << ',' << r.correct << ',' << r.equal << ',' << r.incorrect
        << ',' << formatNumber(r.headlineRate()) << '\n';
  }
}

inline void writeCalibrationCsv(std::ostream& out, const CalibrationCurve& curve) {
  out << "theta,tau,correct,equal,incorrect,headline\n";
  for (const auto& row : curve.rows) {
    const auto& r = row.report;
    out << formatNumber(row.theta, 10) << ',' << formatNumber(r.tau) << ',' << r.correct << ',' << r.equal << ','
        << r.incorrect << ',' << formatNumber(r.headlineRate()) << '\n';
  }
}

}  // namespace mined
