#pragma once

// Part-of-speech attribution of single-edit metric gains.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mined/error.hpp"
#include "mined/evalharness.hpp"
#include "mined/metrics.hpp"
#include "mined/parallel.hpp"
#include "mined/textalign.hpp"

namespace mined {

// Pseudo-tag for insertion errors, which have no reference word.
inline constexpr const char* kInsertionTag = "INS";

struct TaggedToken {
  std::string form;
  std::string upos;

  bool operator==(const TaggedToken&) const = default;
};

struct PosTagging {
  std::map<std::string, std::vector<TaggedToken>> sentences;  // keyed by sent_id

  std::size_t size() const { return sentences.size(); }
  const std::vector<TaggedToken>* find(const std::string& id) const {
    auto it = sentences.find(id);
    return it == sentences.end() ? nullptr : &it->second;
  }
};

namespace detail {

inline std::vector<std::string> splitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

inline std::string trimmed(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// CoNLL-U reader keeping FORM and UPOS. Sentences are separated by blank
/// lines; "# sent_id = X" names a sentence, otherwise its 1-based ordinal is
/// used. Multiword ranges (1-2) and empty nodes (1.1) are skipped.
inline PosTagging loadPosTags(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tag file " + path.string(), 0);
  PosTagging out;
  std::string line;
  std::size_t lineNo = 0;
  std::size_t ordinal = 0;
  std::string id;
  std::size_t idLine = 0;
  std::vector<TaggedToken> tokens;
  bool inSentence = false;

  auto flush = [&] {
    if (!inSentence) return;
    ++ordinal;
    std::string key = id.empty() ? std::to_string(ordinal) : id;
    if (!out.sentences.emplace(key, std::move(tokens)).second) {
      throw ParseError("duplicate sent_id '" + key + "'", idLine == 0 ? lineNo : idLine);
    }
    tokens.clear();
    id.clear();
    idLine = 0;
    inSentence = false;
  };

  while (std::getline(in, line)) {
    ++lineNo;
    if (detail::trimmed(line).empty()) {
      flush();
      continue;
    }
    inSentence = true;
    if (line[0] == '#') {
      auto body = detail::trimmed(line.substr(1));
      if (body.rfind("sent_id", 0) == 0) {
        auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("malformed sent_id comment", lineNo);
        id = detail::trimmed(body.substr(eq + 1));
        idLine = lineNo;
      }
      continue;
    }
    auto cols = detail::splitTabs(line);
    if (cols.size() < 4) throw ParseError("expected at least 4 tab-separated columns", lineNo);
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    tokens.push_back({cols[1], cols[3]});
  }
  flush();
  return out;
}

inline void writePosTags(std::ostream& out, const PosTagging& tags) {
  for (const auto& [id, tokens] : tags.sentences) {
    out << "# sent_id = " << id << '\n';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      out << (i + 1) << '\t' << tokens[i].form << "\t_\t" << tokens[i].upos << "\t_\t_\t_\t_\t_\t_\n";
    }
    out << '\n';
  }
}

struct PosGainRecord {
  std::string pos;
  double gain = 0.0;  // positive = the correction lowers the score
  std::string itemId;
  char hypothesis = 'A';
  EditKind kind = EditKind::Substitution;
};

struct PosGainReport {
  std::vector<PosGainRecord> records;
  std::size_t analyzedItems = 0;
  std::size_t missingTags = 0;
  std::vector<std::string> mismatchedItems;  // tags disagree with tokenization
};

/// Gains of every single correction, measured from the uncorrected
/// hypothesis, for both hypotheses of each tagged item. Substitutions and
/// deletions take the POS of their reference word, insertions take "INS".
inline PosGainReport posGains(const std::vector<SideBySideItem>& items, const PosTagging& tags,
                              const MetricHandle& metric, std::size_t jobs = 1) {
  const auto policy = NormalizationPolicy::forWord();
  PosGainReport report;
  std::vector<std::vector<PosGainRecord>> perItem(items.size());
  std::vector<char> status(items.size(), 0);  // 0 analyzed, 1 missing, 2 mismatch

  parallelFor(items.size(), jobs, [&](std::size_t idx) {
    const auto& item = items[idx];
    const auto* tagged = tags.find(item.id);
    if (!tagged) {
      status[idx] = 1;
      return;
    }
    auto ref = tokenize(item.reference, Granularity::Word, policy);
    bool match = ref.size() == tagged->size();
    for (std::size_t i = 0; match && i < ref.size(); ++i) {
      auto forms = tokenize((*tagged)[i].form, Granularity::Word, policy);
      match = forms.size() == 1 && forms[0] == ref[i];
    }
    if (!match) {
      status[idx] = 2;
      return;
    }
    for (char which : {'A', 'B'}) {
      auto script = align(ref, tokenize(which == 'A' ? item.hypA : item.hypB, Granularity::Word, policy));
      NodeScorer scorer(script, metric);
      const double base = scorer.score(CorrectionSet{});
      std::size_t refPos = 0;
      std::size_t errPos = 0;
      for (const auto& col : script.columns()) {
        if (col.kind != EditKind::Match) {
          PosGainRecord rec;
          rec.pos = col.ref ? (*tagged)[refPos].upos : kInsertionTag;
          rec.gain = base - scorer.score(CorrectionSet{errPos});
          rec.itemId = item.id;
          rec.hypothesis = which;
          rec.kind = col.kind;
          perItem[idx].push_back(std::move(rec));
          ++errPos;
        }
        if (col.ref) ++refPos;
      }
    }
  });

  for (std::size_t i = 0; i < items.size(); ++i) {
    switch (status[i]) {
      case 0:
        ++report.analyzedItems;
        for (auto& r : perItem[i]) report.records.push_back(std::move(r));
        break;
      case 1: ++report.missingTags; break;
      default: report.mismatchedItems.push_back(items[i].id); break;
    }
  }
  if (report.missingTags > 0) warn(std::to_string(report.missingTags) + " items have no POS tagging and were skipped");
  if (!report.mismatchedItems.empty()) {
    warn(std::to_string(report.mismatchedItems.size()) + " items whose tags disagree with the tokenized reference were excluded");
  }
  return report;
}

struct PosGainSummary {
  std::string pos;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;    // unbiased; 0 when count < 2
  bool lowCount = false;  // count < 2
};

/// Per-POS count, mean and unbiased standard deviation, sorted by tag.
inline std::vector<PosGainSummary> gainSummary(const std::vector<PosGainRecord>& records) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : records) groups[r.pos].push_back(r.gain);
  std::vector<PosGainSummary> out;
  for (auto& [pos, gains] : groups) {
    // Sorting makes the floating-point sums independent of record order.
    std::sort(gains.begin(), gains.end());
    PosGainSummary s;
    s.pos = pos;
    s.count = gains.size();
    double sum = 0.0;
    for (double g : gains) sum += g;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count >= 2) {
      double ss = 0.0;
      for (double g : gains) ss += (g - s.mean) * (g - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    } else {
      s.lowCount = true;
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// "pos,count,mean_gain,stddev_gain"; scale100 multiplies gains by 100.
inline void writePosSummaryCsv(std::ostream& out, const std::vector<PosGainSummary>& summary, bool scale100 = false) {
  const double k = scale100 ? 100.0 : 1.0;
  out << "pos,count,mean_gain,stddev_gain\n";
  for (const auto& s : summary) {
    out << s.pos << ',' << s.count << ',' << formatNumber(s.mean * k, 8) << ',' << formatNumber(s.stddev * k, 8) << '\n';
  }
}

}  // namespace mined
