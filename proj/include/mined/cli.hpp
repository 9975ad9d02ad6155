#pragma once

// Command-line front end: score, mined, evaluate, calibrate, pos-gains.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mined/analysis.hpp"
#include "mined/embeddings.hpp"
#include "mined/error.hpp"
#include "mined/evalharness.hpp"
#include "mined/lattice.hpp"
#include "mined/metrics.hpp"
#include "mined/remote_provider.hpp"

namespace mined::cli {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string granularity = "word";
  std::string metric = "wer";
  double theta = 0.0;
  std::string provider = "bag";
  std::string endpoint;
  std::string vectors;
  std::string cache;
  std::string dataset;
  std::string tags;
  std::string output_dir;
  std::size_t jobs = 0;
  std::size_t exact_cap = 16;
  std::size_t beam_width = 64;
  double tie_eps = kDefaultTieEps;
  std::string grid = "default";
  double tau = 1.0;
  std::uint64_t seed = 42;
  bool strip_punctuation = false;
  bool verify_consistency = false;
  bool scale100 = false;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, granularity, metric, theta, provider, endpoint, vectors,
                                                cache, dataset, tags, output_dir, jobs, exact_cap, beam_width, tie_eps,
                                                grid, tau, seed, strip_punctuation, verify_consistency, scale100)

inline RunConfig loadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid config file " + path.string() + ": " + e.what());
  }
}

/// Grid specs: "default" (40 log-spaced values over [1e-4, 1], refined once
/// around the best point), "log:LO:HI:N[:refine]", "list:A,B,C".
struct GridSpec {
  std::vector<double> values;
  bool refine = false;
};

inline GridSpec parseGrid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in grid spec '" + spec + "'");
    }
  };
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  GridSpec g;
  if (spec == "default") {
    g.values = logGrid(1e-4, 1.0, 40);
    g.refine = true;
  } else if (!parts.empty() && parts[0] == "log" && (parts.size() == 4 || (parts.size() == 5 && parts[4] == "refine"))) {
    double n = number(parts[3]);
    if (n < 2 || n != std::floor(n)) throw UsageError("log grid needs an integer count >= 2");
    try {
      g.values = logGrid(number(parts[1]), number(parts[2]), static_cast<std::size_t>(n));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    g.refine = parts.size() == 5;
  } else if (parts.size() == 2 && parts[0] == "list") {
    std::stringstream vs(parts[1]);
    for (std::string v; std::getline(vs, v, ',');) g.values.push_back(number(v));
  } else {
    throw UsageError("unknown grid spec '" + spec + "'");
  }
  try {
    checkGrid(g.values);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return g;
}

class Runner {
 public:
  Runner(RunConfig cfg, std::ostream& out, std::ostream& err) : cfg_(std::move(cfg)), out_(out), err_(err) {}

  Granularity level() const {
    try {
      return parseGranularity(cfg_.granularity);
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }

  SearchConfig searchConfig() const {
    SearchConfig s;
    s.threshold = cfg_.theta;
    s.exactCap = cfg_.exact_cap;
    s.beamWidth = cfg_.beam_width;
    s.verifyConsistency = cfg_.verify_consistency;
    s.seed = cfg_.seed;
    try {
      s.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return s;
  }

  void validatePaths() const {
    auto check = [](const std::string& p, const char* what) {
      if (!p.empty() && !std::filesystem::exists(p)) throw UsageError(std::string(what) + " not found: " + p);
    };
    check(cfg_.dataset, "dataset");
    check(cfg_.tags, "tag file");
    check(cfg_.vectors, "word vector file");
  }

  std::shared_ptr<const WordVectorTable> vectors() {
    if (!vectorTable_) {
      if (cfg_.vectors.empty()) throw UsageError("metric '" + cfg_.metric + "' needs --vectors");
      vectorTable_ = std::make_shared<const WordVectorTable>(loadWordVectors(cfg_.vectors));
    }
    return vectorTable_;
  }

  ProviderPtr provider() {
    if (cfg_.provider == "bag") {
      return bagOfVectorsProvider(vectors(), "bag-of-vectors:" + std::filesystem::absolute(cfg_.vectors).string());
    }
    if (cfg_.provider == "remote" || cfg_.provider == "cached") {
      std::string endpoint = cfg_.endpoint;
      if (endpoint.empty()) {
        if (const char* env = std::getenv("MINED_EMBED_ENDPOINT")) endpoint = env;
      }
      if (endpoint.empty()) throw UsageError("remote provider needs --endpoint or MINED_EMBED_ENDPOINT");
      RemoteProviderOptions opts;
      opts.endpoint = endpoint;
      ProviderPtr remote = remoteProvider(opts);
      if (cfg_.provider == "remote") return remote;
      std::string cachePath = cfg_.cache;
      if (cachePath.empty()) {
        cachePath = (std::filesystem::path(cfg_.output_dir.empty() ? "." : cfg_.output_dir) / "embeddings").string();
      }
      return cachedProvider(remote, EmbeddingCache::open(cachePath));
    }
    throw UsageError("unknown provider '" + cfg_.provider + "' (expected bag|remote|cached)");
  }

  MetricHandle metric() {
    const std::string& spec = cfg_.metric;
    std::optional<MetricHandle> m;
    if (spec == "wer") {
      m = werMetric();
    } else if (spec == "cer") {
      m = cerMetric();
    } else if (spec == "ember") {
      m = emberMetric(vectors());
    } else if (spec == "semdist") {
      m = semDistMetric(provider());
    } else if (spec.rfind("table:", 0) == 0) {
      m = loadTableMetric(spec.substr(6));
    } else {
      throw UsageError("unknown metric '" + spec + "' (expected wer|cer|ember|semdist|table:PATH)");
    }
    if (cfg_.strip_punctuation) {
      auto p = m->normalization();
      p.stripPunctuation = true;
      m->setNormalization(p);
    }
    return *m;
  }

  NormalizationPolicy policyFor(Granularity g) const {
    auto p = NormalizationPolicy::defaultFor(g);
    p.stripPunctuation = cfg_.strip_punctuation;
    return p;
  }

  static std::string readTextArg(const std::string& value) {
    std::error_code ec;
    if (!value.empty() && std::filesystem::is_regular_file(value, ec)) {
      std::ifstream in(value);
      std::stringstream ss;
      ss << in.rdbuf();
      std::string s = ss.str();
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
      return s;
    }
    return value;
  }

  std::vector<SideBySideItem> dataset() const {
    if (cfg_.dataset.empty()) throw UsageError("--dataset is required");
    return loadDataset(cfg_.dataset);
  }

  void echoConfig() const {
    if (cfg_.output_dir.empty()) return;
    std::filesystem::create_directories(cfg_.output_dir);
    std::ofstream f(std::filesystem::path(cfg_.output_dir) / "effective_config.json");
    f << nlohmann::json(cfg_).dump(2) << '\n';
  }

  void emit(const std::string& filename, const std::string& csv) const {
    out_ << csv;
    if (cfg_.output_dir.empty()) return;
    std::ofstream f(std::filesystem::path(cfg_.output_dir) / filename);
    f << csv;
    if (!f) throw Error("cannot write " + filename + " in " + cfg_.output_dir);
  }

  int score(const std::string& ref, const std::string& hyp) {
    auto m = metric();
    out_ << formatNumber(m.scoreText(readTextArg(ref), readTextArg(hyp)), 10) << '\n';
    return 0;
  }

  int mined(const std::string& ref, const std::string& hyp, bool exactVerify) {
    auto m = metric();
    auto cfg = searchConfig();
    const auto g = level();
    const auto policy = policyFor(g);
    auto script = align(tokenize(readTextArg(ref), g, policy), tokenize(readTextArg(hyp), g, policy));
    auto r = minEdits(script, m, cfg);
    out_ << "k=" << r.editsNeeded << " rate=" << formatNumber(r.rate, 10)
         << " residual=" << formatNumber(r.residualScore, 10) << " strategy=" << toString(r.strategy)
         << " acceptable=" << (r.acceptable ? "true" : "false") << " errors=" << script.errorCount()
         << " nodes=" << r.nodesEvaluated << '\n';
    if (!exactVerify) return 0;
    if (script.errorCount() > 24) throw UsageError("--exact-verify supports at most 24 errors");
    auto exactCfg = cfg;
    exactCfg.exactCap = std::max<std::size_t>(cfg.exactCap, script.errorCount());
    auto exact = minEditsExact(script, m, exactCfg);
    if (exact.editsNeeded == r.editsNeeded) {
      out_ << "verify=match\n";
      return 0;
    }
    out_ << "verify=MISMATCH exact_k=" << exact.editsNeeded << '\n';
    return 1;
  }

  int evaluate() {
    auto items = dataset();
    auto m = metric();
    auto report = correlate(m, items, AgreementFilter(checkedTau()), cfg_.tie_eps, cfg_.jobs);
    std::ostringstream csv;
    writeCorrelationCsv(csv, {report});
    emit("correlation.csv", csv.str());
    return 0;
  }

  int calibrate() {
    auto items = dataset();
    auto m = metric();
    auto grid = parseGrid(cfg_.grid);
    const auto g = level();
    AgreementFilter filter(checkedTau());
    auto search = searchConfig();
    auto kept = judgeableItems(items, filter);
    MinEdProfiles profiles(m, g, search, kept, cfg_.jobs);
    const std::string name = std::string(g == Granularity::Word ? "minWED(" : "minCED(") + m.name() + ")";
    auto curveFor = [&](const std::vector<double>& thetas) {
      CalibrationCurve c;
      for (double t : thetas) c.rows.push_back({t, profiles.reportAt(t, cfg_.tie_eps, name, filter.minAgreement)});
      c.updateArgmax();
      return c;
    };
    auto curve = curveFor(grid.values);
    if (grid.refine) mergeCurve(curve, curveFor(refinementGrid(curve)));
    std::ostringstream csv;
    writeCalibrationCsv(csv, curve);
    emit("calibration.csv", csv.str());
    err_ << "argmax_theta=" << formatNumber(curve.argmaxTheta, 10) << '\n';
    return 0;
  }

  int posGainsCmd() {
    auto items = dataset();
    if (cfg_.tags.empty()) throw UsageError("--tags is required");
    auto tags = loadPosTags(cfg_.tags);
    auto m = metric();
    auto report = posGains(items, tags, m, cfg_.jobs);
    std::ostringstream csv;
    writePosSummaryCsv(csv, gainSummary(report.records), cfg_.scale100);
    emit("pos_gains.csv", csv.str());
    err_ << "note: insertion errors are reported under the pseudo-tag " << kInsertionTag << "; analyzed "
         << report.analyzedItems << " items, " << report.missingTags << " without tags, "
         << report.mismatchedItems.size() << " with mismatched tokens\n";
    return 0;
  }

 private:
  double checkedTau() const {
    if (!(cfg_.tau >= 0.5 && cfg_.tau <= 1.0)) throw UsageError("--tau must lie in [0.5, 1.0]");
    return cfg_.tau;
  }

  RunConfig cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::shared_ptr<const WordVectorTable> vectorTable_;
};

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Minimum edit distance (minED) evaluation toolkit for ASR metrics", "mined"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig flags;
  std::string configPath;
  struct Field {
    CLI::Option* opt;
    std::function<void(RunConfig&, const RunConfig&)> copy;
  };
  std::vector<Field> fields;
#define MINED_FLAG(NAME, MEMBER, HELP)                 \
  fields.push_back({app.add_option(NAME, flags.MEMBER, HELP), \
                    [](RunConfig& d, const RunConfig& s) { d.MEMBER = s.MEMBER; }})
#define MINED_SWITCH(NAME, MEMBER, HELP)             \
  fields.push_back({app.add_flag(NAME, flags.MEMBER, HELP), \
                    [](RunConfig& d, const RunConfig& s) { d.MEMBER = s.MEMBER; }})
  MINED_FLAG("--metric", metric, "wer|cer|ember|semdist|table:PATH");
  MINED_FLAG("--level,--granularity", granularity, "word|char");
  MINED_FLAG("--theta", theta, "acceptability threshold (lower is better)");
  MINED_FLAG("--provider", provider, "sentence embeddings for semdist: bag|remote|cached");
  MINED_FLAG("--endpoint", endpoint, "embedding service base URL (falls back to MINED_EMBED_ENDPOINT)");
  MINED_FLAG("--vectors", vectors, "word vectors in fastText .vec text format");
  MINED_FLAG("--cache", cache, "embedding cache path prefix (.idx/.bin)");
  MINED_FLAG("--dataset", dataset, "side-by-side dataset (JSON Lines)");
  MINED_FLAG("--tags", tags, "CoNLL-U POS tags for dataset references");
  MINED_FLAG("--out,--output-dir", output_dir, "directory for CSV reports and the effective config");
  MINED_FLAG("--jobs", jobs, "worker threads (0 = logical CPUs)");
  MINED_FLAG("--exact-cap", exact_cap, "largest error count searched exhaustively");
  MINED_FLAG("--beam-width", beam_width, "nodes kept per level by beam search");
  MINED_FLAG("--tie-eps", tie_eps, "score difference treated as a tie");
  MINED_FLAG("--grid", grid, "default | log:LO:HI:N[:refine] | list:A,B,...");
  MINED_FLAG("--tau", tau, "human agreement filter in [0.5, 1]");
  MINED_FLAG("--seed", seed, "seed for randomized consistency probing");
  MINED_SWITCH("--strip-punct", strip_punctuation, "treat punctuation as whitespace");
  MINED_SWITCH("--verify-consistency", verify_consistency, "probe declared-consistent metrics before the fast path");
  MINED_SWITCH("--scale100", scale100, "multiply reported gains by 100");
#undef MINED_FLAG
#undef MINED_SWITCH
  app.add_option("--config", configPath, "JSON config; explicit flags take precedence")->check(CLI::ExistingFile);

  std::string ref, hyp;
  bool exactVerify = false;
  auto* score = app.add_subcommand("score", "score one reference/hypothesis pair");
  score->add_option("--ref", ref, "reference text or file")->required();
  score->add_option("--hyp", hyp, "hypothesis text or file")->required();
  auto* mined = app.add_subcommand("mined", "minimum number of edits to reach the threshold");
  mined->add_option("--ref", ref, "reference text or file")->required();
  mined->add_option("--hyp", hyp, "hypothesis text or file")->required();
  mined->add_flag("--exact-verify", exactVerify, "cross-check against exhaustive search");
  auto* evaluate = app.add_subcommand("evaluate", "metric/human agreement on a side-by-side dataset");
  auto* calibrate = app.add_subcommand("calibrate", "agreement of minED over a threshold grid");
  auto* posGainsSub = app.add_subcommand("pos-gains", "single-edit gains per part of speech");

  std::vector<std::string> argvStore = args;
  argvStore.insert(argvStore.begin(), "mined");
  std::vector<char*> argv;
  for (auto& a : argvStore) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = configPath.empty() ? RunConfig{} : loadRunConfig(configPath);
    for (const auto& f : fields) {
      if (f.opt->count() > 0) f.copy(cfg, flags);
    }
    Runner runner(cfg, out, err);
    runner.validatePaths();
    runner.echoConfig();
    if (score->parsed()) return runner.score(ref, hyp);
    if (mined->parsed()) return runner.mined(ref, hyp, exactVerify);
    if (evaluate->parsed()) return runner.evaluate();
    if (calibrate->parsed()) return runner.calibrate();
    if (posGainsSub->parsed()) return runner.posGainsCmd();
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace mined::cli
