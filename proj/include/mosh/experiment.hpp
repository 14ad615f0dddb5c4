/**
 * @file experiment.hpp
 * @brief Experiment orchestration: config parsing, per-seed pipelines,
 *        artifact layout, and the command entry points behind the CLI.
 *
 * Everything an experiment produces is a pure function of (config, seed):
 * archives are JSON lines, metric traces are CSV, and rerunning the same
 * config into a fresh directory reproduces the same bytes. The manifest
 * (which records wall-clock times) is the only exception.
 */
#ifndef MOSH_EXPERIMENT_HPP
#define MOSH_EXPERIMENT_HPP

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mosh/bench.hpp"
#include "mosh/dense.hpp"
#include "mosh/metrics.hpp"
#include "mosh/sparse.hpp"

namespace mosh {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Shortest round-trip decimal form, used for every CSV number.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace detail

/**
 * @brief One experiment: a problem/bounds pair, a step-1 method, a
 *        sparsifier, and the run parameters. Loaded from JSON; every
 *        field has a default so a minimal config can be `{}`.
 */
struct ExperimentConfig {
  std::string problem = "branin_currin";
  std::string bounds = "complete_mid";
  std::string method = "mosh_dense";  ///< mosh_dense | random | mobo_rs_linear | discrete_greedy
  std::string sparsifier = "saturate";  ///< saturate | greedy | random
  std::size_t iterations = 100;         ///< adaptive evaluations after warm-up
  std::size_t k = 5;                    ///< sparsification budget
  std::size_t lambda_count = 100;       ///< |Lambda| inside the sparsifier
  double upsilon = 0.75;                ///< soft-region weight in fill / ratio metrics
  double delta = 0.05;                  ///< grid step for the discrete baseline
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6};
  std::string out_dir = "runs";

  void validate() const {
    const Problem prob = problem_by_id(problem);
    (void)prob.configuration(bounds);
    static const std::set<std::string> methods = {"mosh_dense", "random", "mobo_rs_linear",
                                                  "discrete_greedy"};
    if (!methods.count(method))
      throw std::invalid_argument("ExperimentConfig: unknown method '" + method + "'");
    static const std::set<std::string> sparsifiers = {"saturate", "greedy", "random"};
    if (!sparsifiers.count(sparsifier))
      throw std::invalid_argument("ExperimentConfig: unknown sparsifier '" + sparsifier + "'");
    if (iterations == 0) throw std::invalid_argument("ExperimentConfig: iterations must be > 0");
    if (k == 0) throw std::invalid_argument("ExperimentConfig: k must be > 0");
    if (lambda_count == 0)
      throw std::invalid_argument("ExperimentConfig: lambda_count must be > 0");
    if (!(upsilon >= 0.0 && upsilon <= 1.0))
      throw std::invalid_argument("ExperimentConfig: upsilon must lie in [0, 1]");
    if (!(delta > 0.0)) throw std::invalid_argument("ExperimentConfig: delta must be > 0");
    if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: seeds must be non-empty");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size())
      throw std::invalid_argument("ExperimentConfig: seeds must be distinct");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["problem"] = problem;
    j["bounds"] = bounds;
    j["method"] = method;
    j["sparsifier"] = sparsifier;
    j["iterations"] = iterations;
    j["k"] = k;
    j["lambda_count"] = lambda_count;
    j["upsilon"] = upsilon;
    j["delta"] = delta;
    j["seeds"] = seeds;
    j["out_dir"] = out_dir;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"problem",      "bounds",  "method",
                                                "sparsifier",   "iterations", "k",
                                                "lambda_count", "upsilon", "delta",
                                                "seeds",        "out_dir"};
    for (const auto& item : j.items())
      if (!known.count(item.key()))
        throw std::invalid_argument("ExperimentConfig: unknown key '" + item.key() + "'");
    ExperimentConfig cfg;
    if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
    if (j.contains("bounds")) cfg.bounds = j.at("bounds").get<std::string>();
    if (j.contains("method")) cfg.method = j.at("method").get<std::string>();
    if (j.contains("sparsifier")) cfg.sparsifier = j.at("sparsifier").get<std::string>();
    if (j.contains("iterations")) cfg.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("k")) cfg.k = j.at("k").get<std::size_t>();
    if (j.contains("lambda_count"))
      cfg.lambda_count = j.at("lambda_count").get<std::size_t>();
    if (j.contains("upsilon")) cfg.upsilon = j.at("upsilon").get<double>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    return cfg;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    nlohmann::json j;
    in >> j;
    return from_json(j);
  }
};

/// Stable identity of a resolved config; embedded in every output file.
/// out_dir is plumbing, not part of the experiment, so the same experiment
/// written to two directories yields byte-identical artifacts.
inline std::string config_hash(const ExperimentConfig& cfg) {
  nlohmann::json j = cfg.to_json();
  j.erase("out_dir");
  return detail::hex64(detail::fnv1a64(j.dump()));
}

/// Identity of the step-1 slice of a config: exactly the fields that
/// determine an archive's bytes. Archives embed this hash, so changing a
/// step-2 knob (sparsifier, k, ...) or the seed list never invalidates
/// them.
inline std::string dense_stage_hash(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["problem"] = cfg.problem;
  j["bounds"] = cfg.bounds;
  j["method"] = cfg.method;
  j["iterations"] = cfg.iterations;
  if (cfg.method == "discrete_greedy") j["delta"] = cfg.delta;
  return detail::hex64(detail::fnv1a64(j.dump()));
}

/// Every tunable that the config does not expose, recorded with each run.
inline nlohmann::json decisions_in_effect() {
  nlohmann::json d;
  d["chebyshev_gamma"] = 0.05;
  d["utopia_offset"] = 0.01;
  d["shf_zeta"] = 2.0;
  d["shf_beta_slope"] = 0.5;
  d["noise_sigma"] = 0.01;
  d["oracle_budget"] = 10000;
  d["oracle_seed"] = 0;
  d["dws_distance_floor"] = 1e-9;
  d["lambda_weight_floor"] = 1e-6;
  d["saturate_refine_width"] = 1e-9;
  d["psi_log_base"] = "natural";
  d["acq_candidates"] = 256;
  return d;
}

struct RunManifest {
  std::string config_hash;
  std::string code_version = kCodeVersion;
  nlohmann::json config;
  nlohmann::json decisions;
  std::vector<std::string> artifacts;          ///< paths relative to out_dir
  std::map<std::string, double> wall_seconds;  ///< per pipeline stage

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["code_version"] = code_version;
    j["config"] = config;
    j["decisions"] = decisions;
    j["artifacts"] = artifacts;
    j["wall_seconds"] = wall_seconds;
    return j;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
    out << to_json().dump(2) << '\n';
  }
};

inline RunManifest make_manifest(const ExperimentConfig& cfg) {
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.config = cfg.to_json();
  m.decisions = decisions_in_effect();
  return m;
}

// ---------------------------------------------------------------------------
// Archive files: one JSON object per line, header first. Utilities can be
// -inf, which JSON cannot carry as a number; those entries are written as
// null and restored on read.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json vector_to_json(const std::vector<double>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (double x : v) {
    if (is_neg_inf(x))
      arr.push_back(nullptr);
    else
      arr.push_back(x);
  }
  return arr;
}

inline std::vector<double> vector_from_json(const nlohmann::json& arr) {
  std::vector<double> v;
  v.reserve(arr.size());
  for (const auto& x : arr) v.push_back(x.is_null() ? kNegInf : x.get<double>());
  return v;
}

inline nlohmann::json record_to_json(const SampleRecord& rec) {
  nlohmann::json j;
  j["type"] = "record";
  j["t"] = rec.t;
  j["x"] = vector_to_json(rec.x);
  j["y"] = vector_to_json(rec.y);
  j["u"] = vector_to_json(rec.u);
  j["lambda"] = vector_to_json(rec.lambda);
  return j;
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord rec;
  rec.t = j.at("t").get<std::size_t>();
  rec.x = vector_from_json(j.at("x"));
  rec.y = vector_from_json(j.at("y"));
  rec.u = vector_from_json(j.at("u"));
  rec.lambda = vector_from_json(j.at("lambda"));
  return rec;
}

}  // namespace detail

inline void append_record_line(std::ostream& out, const SampleRecord& rec) {
  out << detail::record_to_json(rec).dump() << '\n';
  out.flush();
}

inline void write_archive_header(std::ostream& out, std::uint64_t seed,
                                 const std::string& manifest_hash) {
  nlohmann::json j;
  j["type"] = "header";
  j["seed"] = seed;
  j["manifest_hash"] = manifest_hash;
  out << j.dump() << '\n';
  out.flush();
}

inline void write_archive(const std::filesystem::path& path, const SampleArchive& archive,
                          const std::string& manifest_hash) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write archive " + path.string());
  write_archive_header(out, archive.seed, manifest_hash);
  for (const SampleRecord& rec : archive.records) append_record_line(out, rec);
}

struct ArchiveFile {
  std::string manifest_hash;
  SampleArchive archive;
};

/**
 * @brief Read a JSONL archive. A torn final line (interrupted write) is
 *        dropped so the remaining prefix stays resumable; any earlier
 *        malformed line is an error.
 */
inline ArchiveFile read_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing archive " + path.string());
  ArchiveFile file;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw std::runtime_error("archive has no header: " + path.string());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error&) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted run
      throw std::runtime_error("malformed archive line " + std::to_string(i + 1) + " in " +
                               path.string());
    }
    const std::string type = j.at("type").get<std::string>();
    if (i == 0) {
      if (type != "header")
        throw std::runtime_error("archive does not start with a header: " + path.string());
      file.manifest_hash = j.at("manifest_hash").get<std::string>();
      file.archive.seed = j.at("seed").get<std::uint64_t>();
    } else {
      if (type != "record")
        throw std::runtime_error("unexpected line type '" + type + "' in " + path.string());
      file.archive.records.push_back(detail::record_from_json(j));
    }
  }
  return file;
}

// ---------------------------------------------------------------------------
// Output layout
// ---------------------------------------------------------------------------

inline std::filesystem::path dense_method_dir(const ExperimentConfig& cfg,
                                              const std::string& method) {
  return std::filesystem::path(cfg.out_dir) / "dense" / method;
}

inline std::filesystem::path dense_seed_dir(const ExperimentConfig& cfg,
                                            const std::string& method, std::uint64_t seed) {
  return dense_method_dir(cfg, method) / ("seed_" + std::to_string(seed));
}

inline std::filesystem::path sparse_seed_dir(const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::filesystem::path(cfg.out_dir) / "sparse" / (cfg.method + "-" + cfg.sparsifier) /
         ("seed_" + std::to_string(seed));
}

// ---------------------------------------------------------------------------
// CSV writers. First line carries the manifest hash as a # comment.
// ---------------------------------------------------------------------------

inline void write_metrics_csv(const std::filesystem::path& path,
                              const std::vector<MetricRow>& rows,
                              const std::string& manifest_hash) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# manifest " << manifest_hash << '\n';
  out << "iter,fill,pos_ratio,hv_soft,hv_hard,dws,shf_ratio\n";
  for (const MetricRow& r : rows)
    out << r.iter << ',' << format_double(r.fill) << ',' << format_double(r.pos_ratio) << ','
        << format_double(r.hv_soft) << ',' << format_double(r.hv_hard) << ','
        << format_double(r.dws) << ',' << format_double(r.shf_ratio) << '\n';
}

/// Mean and sample standard deviation per iteration across seeds, rows
/// truncated to the shortest trace.
inline void write_summary_csv(const std::filesystem::path& path,
                              const std::vector<std::vector<MetricRow>>& per_seed,
                              const std::string& manifest_hash) {
  std::size_t rows = per_seed.empty() ? 0 : per_seed.front().size();
  for (const auto& trace : per_seed) rows = std::min(rows, trace.size());

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# manifest " << manifest_hash << '\n';
  out << "iter,fill_mean,fill_std,pos_ratio_mean,pos_ratio_std,hv_soft_mean,hv_soft_std,"
         "hv_hard_mean,hv_hard_std,dws_mean,dws_std,shf_ratio_mean,shf_ratio_std\n";

  const double n = static_cast<double>(per_seed.size());
  const auto stats = [&](auto pick, std::size_t i) {
    double mean = 0.0;
    for (const auto& trace : per_seed) mean += pick(trace[i]);
    mean /= n;
    double var = 0.0;
    for (const auto& trace : per_seed) {
      const double d = pick(trace[i]) - mean;
      var += d * d;
    }
    const double sd = per_seed.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return std::pair<double, double>(mean, sd);
  };

  for (std::size_t i = 0; i < rows; ++i) {
    out << per_seed.front()[i].iter;
    const auto emit = [&](auto pick) {
      const auto [mean, sd] = stats(pick, i);
      out << ',' << format_double(mean) << ',' << format_double(sd);
    };
    emit([](const MetricRow& r) { return r.fill; });
    emit([](const MetricRow& r) { return r.pos_ratio; });
    emit([](const MetricRow& r) { return r.hv_soft; });
    emit([](const MetricRow& r) { return r.hv_hard; });
    emit([](const MetricRow& r) { return r.dws; });
    emit([](const MetricRow& r) { return r.shf_ratio; });
    out << '\n';
  }
}

inline void write_ratio_trace_csv(const std::filesystem::path& path,
                                  const std::vector<double>& trace,
                                  const std::string& manifest_hash) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# manifest " << manifest_hash << '\n';
  out << "viewed,shf_ratio\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << (i + 1) << ',' << format_double(trace[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Per-seed pipelines
// ---------------------------------------------------------------------------

inline DenseConfig make_dense_config(const ExperimentConfig& cfg, const Problem& problem,
                                     std::uint64_t seed) {
  DenseConfig d;
  d.iterations = cfg.iterations;
  d.spec = problem.configuration(cfg.bounds);
  d.scalarization =
      cfg.method == "mobo_rs_linear" ? Scalarization::linear : Scalarization::chebyshev;
  d.seed = seed;
  return d;
}

struct DenseSeedOutcome {
  SampleArchive archive;
  double wall_seconds = 0.0;
  bool reused = false;  ///< a complete archive was already on disk
};

/**
 * @brief Run (or resume, or reuse) one step-1 seed and persist its archive.
 *
 * Records stream to disk as they are produced, so an interrupted run
 * leaves a valid prefix; the next invocation replays it without spending
 * oracle calls and continues bit-identically. An archive written under a
 * different config hash is an error, never silently overwritten.
 */
inline DenseSeedOutcome run_dense_seed(const ExperimentConfig& cfg, const Problem& problem,
                                       std::uint64_t seed, const std::string& manifest_hash) {
  const auto start = std::chrono::steady_clock::now();
  const DenseConfig dcfg = make_dense_config(cfg, problem, seed);
  const std::size_t total = dcfg.warmup_count(problem.dim()) + cfg.iterations;

  const std::filesystem::path dir = dense_seed_dir(cfg, cfg.method, seed);
  std::filesystem::create_directories(dir);
  const std::filesystem::path apath = dir / "archive.jsonl";

  DenseSeedOutcome outcome;
  SampleArchive existing;
  existing.seed = seed;
  if (std::filesystem::exists(apath)) {
    ArchiveFile file = read_archive(apath);
    if (file.manifest_hash != manifest_hash)
      throw std::runtime_error("archive " + apath.string() +
                               " was produced by a different configuration (hash " +
                               file.manifest_hash + ")");
    if (file.archive.seed != seed)
      throw std::runtime_error("archive " + apath.string() + " carries seed " +
                               std::to_string(file.archive.seed));
    if (file.archive.records.size() > total)
      throw std::runtime_error("archive " + apath.string() + " is longer than the configured run");
    if (file.archive.records.size() == total) {
      outcome.archive = std::move(file.archive);
      outcome.reused = true;
      outcome.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return outcome;
    }
    existing = std::move(file.archive);
  }

  // discrete_greedy has no replay path; it is deterministic and cheap, so a
  // partial archive is simply regenerated in full
  const bool resumable = cfg.method != "discrete_greedy";

  std::ofstream out(apath, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write archive " + apath.string());
  write_archive_header(out, seed, manifest_hash);
  if (resumable)
    for (const SampleRecord& rec : existing.records) append_record_line(out, rec);
  const RecordSink sink = [&](const SampleRecord& rec) { append_record_line(out, rec); };
  const SampleArchive* resume =
      resumable && !existing.records.empty() ? &existing : nullptr;

  NoisyOracle noisy(problem, seed);
  const Oracle oracle = [&](const std::vector<double>& x, std::size_t t) {
    return noisy.evaluate(x, t);
  };

  if (cfg.method == "mosh_dense" || cfg.method == "mobo_rs_linear") {
    outcome.archive = mosh_dense(dcfg, problem, oracle, sink, resume);
  } else if (cfg.method == "random") {
    outcome.archive = random_baseline(dcfg, problem, oracle, sink, resume);
  } else {
    outcome.archive = discrete_greedy(dcfg, problem, oracle, cfg.delta, sink).archive;
  }
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

/// The simulated decision maker for a seed: one preference draw from a
/// stream no optimizer reads.
inline WeightVector lambda_star_for_seed(const ShfVectorSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "lambda_star"));
  return sample_lambda(spec, rng);
}

/// The sparsifier's own preference sample, disjoint from the DM stream.
inline std::vector<WeightVector> sparse_lambdas_for_seed(const ShfVectorSpec& spec,
                                                         std::uint64_t seed, std::size_t m) {
  Rng rng(derive_seed(seed, "sparse_lambdas"));
  std::vector<WeightVector> lambdas;
  lambdas.reserve(m);
  for (std::size_t i = 0; i < m; ++i) lambdas.push_back(sample_lambda(spec, rng));
  return lambdas;
}

struct SparseSeedResult {
  std::vector<std::size_t> selected;  ///< archive record indices, viewing order
  std::vector<double> ratio_trace;    ///< utility ratio after each viewed point
  nlohmann::json selection;           ///< full selection document
};

/**
 * @brief Sparsify one archive and trace the utility ratio per viewed point.
 *
 * SATURATE always runs first: its cover size fixes the budget for the
 * greedy and random baselines so all three present the DM with equally
 * many points. The trace's reference set is the dense archive itself
 * (the ratio hits 1.0 exactly once the viewed points cover the archive's
 * best under lambda*).
 */
inline SparseSeedResult run_sparse_seed(const ExperimentConfig& cfg, const Problem& problem,
                                        const SampleArchive& archive,
                                        const std::string& manifest_hash) {
  const ShfVectorSpec spec = problem.configuration(cfg.bounds);
  const ScalarizeParams params = default_scalarize_params(spec);
  const std::uint64_t seed = archive.seed;

  std::vector<std::vector<double>> utilities;
  utilities.reserve(archive.records.size());
  for (const SampleRecord& rec : archive.records) utilities.push_back(rec.u);

  const auto lambdas = sparse_lambdas_for_seed(spec, seed, cfg.lambda_count);
  const CoverageObjective obj = CoverageObjective::build(utilities, lambdas, params);
  const SaturateResult sat = saturate(obj, cfg.k);

  std::vector<std::size_t> local;  // indices into obj's point list
  if (cfg.sparsifier == "saturate") {
    local = sat.chosen;
  } else if (cfg.sparsifier == "greedy") {
    local = greedy_maxmin(obj, sat.chosen.size());
  } else {
    Rng rng(derive_seed(seed, "sparse_random"));
    local = random_subset(obj.num_points(), sat.chosen.size(), rng);
  }

  SparseSeedResult result;
  for (std::size_t c : local) result.selected.push_back(obj.point_index[c]);

  const WeightVector lambda_star = lambda_star_for_seed(spec, seed);
  std::vector<std::vector<double>> viewed;
  for (std::size_t idx : result.selected) {
    viewed.push_back(archive.records[idx].u);
    result.ratio_trace.push_back(shf_utility_ratio(viewed, lambda_star, utilities, params));
  }

  nlohmann::json sel;
  sel["type"] = "selection";
  sel["manifest_hash"] = manifest_hash;
  sel["seed"] = seed;
  sel["sparsifier"] = cfg.sparsifier;
  sel["k"] = cfg.k;
  sel["notes"] = obj.notes;
  if (cfg.sparsifier == "saturate") {
    sel["psi"] = sat.psi;
    sel["size_cap"] = sat.size_cap;
    sel["q_lo"] = sat.q_lo;
    sel["q_hi"] = sat.q_hi;
    nlohmann::json trace = nlohmann::json::array();
    for (const QProbe& p : sat.q_trace) {
      nlohmann::json probe;
      probe["q"] = p.q;
      probe["cover_size"] = p.cover_size;
      probe["accepted"] = p.accepted;
      probe["refined"] = p.refined;
      trace.push_back(probe);
    }
    sel["q_trace"] = trace;
  }
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t i = 0; i < local.size(); ++i) {
    const SampleRecord& rec = archive.records[result.selected[i]];
    nlohmann::json r;
    r["archive_index"] = result.selected[i];
    r["t"] = rec.t;
    r["x"] = detail::vector_to_json(rec.x);
    r["y"] = detail::vector_to_json(rec.y);
    r["u"] = detail::vector_to_json(rec.u);
    nlohmann::json cov = nlohmann::json::array();
    for (std::size_t lam = 0; lam < obj.num_lambdas(); ++lam)
      cov.push_back(obj.value[lam][local[i]]);
    r["coverage"] = cov;
    records.push_back(r);
  }
  sel["records"] = records;
  result.selection = sel;
  return result;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Step 1 over all seeds (parallel), with per-seed metric traces and a
/// cross-seed summary table.
inline RunManifest cmd_dense(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = problem_by_id(cfg.problem);
  const ShfVectorSpec spec = problem.configuration(cfg.bounds);
  const std::string hash = config_hash(cfg);
  RunManifest manifest = make_manifest(cfg);

  const OfflineOracle oracle = build_offline_oracle(problem, spec);
  for (const std::string& w : oracle.warnings) std::cerr << "oracle: " << w << '\n';

  struct PerSeed {
    std::vector<MetricRow> trace;
    double wall = 0.0;
  };
  const std::string stage_hash = dense_stage_hash(cfg);
  std::vector<std::future<PerSeed>> futures;
  for (std::uint64_t seed : cfg.seeds) {
    futures.push_back(std::async(std::launch::async, [&, seed] {
      const DenseSeedOutcome outcome = run_dense_seed(cfg, problem, seed, stage_hash);
      const WeightVector lambda_star = lambda_star_for_seed(spec, seed);
      PerSeed per;
      per.trace = metric_trace(outcome.archive, oracle, lambda_star, cfg.upsilon);
      write_metrics_csv(dense_seed_dir(cfg, cfg.method, seed) / "metrics.csv", per.trace, hash);
      per.wall = outcome.wall_seconds;
      return per;
    }));
  }

  std::vector<std::vector<MetricRow>> traces;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    PerSeed per = futures[i].get();
    traces.push_back(std::move(per.trace));
    const std::string tag = "dense/" + cfg.method + "/seed_" + std::to_string(cfg.seeds[i]);
    manifest.wall_seconds[tag] = per.wall;
    manifest.artifacts.push_back(tag + "/archive.jsonl");
    manifest.artifacts.push_back(tag + "/metrics.csv");
  }
  write_summary_csv(dense_method_dir(cfg, cfg.method) / "summary.csv", traces, hash);
  manifest.artifacts.push_back("dense/" + cfg.method + "/summary.csv");
  manifest.save(std::filesystem::path(cfg.out_dir) / "manifest_dense.json");
  return manifest;
}

/**
 * @brief Step 2 over existing archives. With @p archive_override, exactly
 *        that archive is sparsified; otherwise each configured seed's
 *        archive must already exist under the dense layout.
 */
inline RunManifest cmd_sparse(const ExperimentConfig& cfg,
                              const std::string& archive_override = "") {
  cfg.validate();
  const Problem problem = problem_by_id(cfg.problem);
  const std::string hash = config_hash(cfg);
  RunManifest manifest = make_manifest(cfg);

  std::vector<std::filesystem::path> archives;
  if (!archive_override.empty()) {
    archives.push_back(archive_override);
  } else {
    for (std::uint64_t seed : cfg.seeds)
      archives.push_back(dense_seed_dir(cfg, cfg.method, seed) / "archive.jsonl");
  }

  const std::string stage_hash = dense_stage_hash(cfg);
  for (const auto& apath : archives) {
    const auto start = std::chrono::steady_clock::now();
    const ArchiveFile file = read_archive(apath);  // throws when missing
    if (archive_override.empty() && file.manifest_hash != stage_hash)
      throw std::runtime_error("archive " + apath.string() +
                               " was produced by a different configuration");
    if (!archive_override.empty() && file.manifest_hash != stage_hash)
      std::cerr << "sparse: archive hash " << file.manifest_hash
                << " differs from this config\n";

    const SparseSeedResult result = run_sparse_seed(cfg, problem, file.archive, hash);

    const std::filesystem::path dir = sparse_seed_dir(cfg, file.archive.seed);
    std::filesystem::create_directories(dir);
    std::ofstream sel(dir / "selection.json", std::ios::trunc);
    if (!sel) throw std::runtime_error("cannot write " + (dir / "selection.json").string());
    sel << result.selection.dump(2) << '\n';
    sel.close();
    write_ratio_trace_csv(dir / "ratio_trace.csv", result.ratio_trace, hash);

    const std::string tag = "sparse/" + cfg.method + "-" + cfg.sparsifier + "/seed_" +
                            std::to_string(file.archive.seed);
    manifest.artifacts.push_back(tag + "/selection.json");
    manifest.artifacts.push_back(tag + "/ratio_trace.csv");
    manifest.wall_seconds[tag] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  manifest.save(std::filesystem::path(cfg.out_dir) / "manifest_sparse.json");
  return manifest;
}

namespace detail {

/// Selection for the end-to-end table, with graceful degradation: an
/// archive without enough usable points falls back to its earliest
/// hard-feasible records rather than aborting the whole comparison.
inline std::vector<std::size_t> e2e_selection(const ExperimentConfig& cfg,
                                              const std::vector<std::vector<double>>& utilities,
                                              std::uint64_t seed, const ShfVectorSpec& spec,
                                              const ScalarizeParams& params,
                                              std::vector<std::string>& warnings) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < utilities.size(); ++i)
    if (hard_feasible(utilities[i])) feasible.push_back(i);
  if (feasible.empty()) {
    warnings.push_back("seed " + std::to_string(seed) +
                       ": archive holds no hard-feasible point; ratio is 0");
    return {};
  }
  try {
    const auto lambdas = sparse_lambdas_for_seed(spec, seed, cfg.lambda_count);
    const CoverageObjective obj = CoverageObjective::build(utilities, lambdas, params);
    const SaturateResult sat = saturate(obj, cfg.k);
    std::vector<std::size_t> selected;
    for (std::size_t c : sat.chosen) selected.push_back(obj.point_index[c]);
    return selected;
  } catch (const std::invalid_argument& e) {
    warnings.push_back("seed " + std::to_string(seed) + ": sparsifier degenerate (" + e.what() +
                       "); falling back to earliest feasible points");
    if (feasible.size() > 5) feasible.resize(5);
    return feasible;
  }
}

}  // namespace detail

/**
 * @brief Full two-step comparison: every step-1 method feeds SATURATE, and
 *        the table reports the utility ratio after the DM views at most 5
 *        points, against the offline oracle frontier.
 */
inline RunManifest cmd_e2e(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = problem_by_id(cfg.problem);
  const ShfVectorSpec spec = problem.configuration(cfg.bounds);
  const ScalarizeParams params = default_scalarize_params(spec);
  RunManifest manifest = make_manifest(cfg);

  const OfflineOracle oracle = build_offline_oracle(problem, spec);
  for (const std::string& w : oracle.warnings) std::cerr << "oracle: " << w << '\n';

  const std::vector<std::string> methods = {"mosh_dense", "random", "mobo_rs_linear",
                                            "discrete_greedy"};
  constexpr std::size_t kViewCap = 5;

  struct Cell {
    double raw = 0.0;
  };
  std::map<std::string, std::vector<Cell>> table;  // method -> per-seed cells
  std::vector<std::string> warnings;

  for (const std::string& method : methods) {
    ExperimentConfig mcfg = cfg;
    mcfg.method = method;
    const std::string mhash = dense_stage_hash(mcfg);

    struct SeedCell {
      Cell cell;
      double wall = 0.0;
      std::vector<std::string> warnings;
    };
    std::vector<std::future<SeedCell>> futures;
    for (std::uint64_t seed : cfg.seeds) {
      futures.push_back(std::async(std::launch::async, [&, seed] {
        const auto start = std::chrono::steady_clock::now();
        const DenseSeedOutcome outcome = run_dense_seed(mcfg, problem, seed, mhash);
        std::vector<std::vector<double>> utilities;
        for (const SampleRecord& rec : outcome.archive.records) utilities.push_back(rec.u);

        SeedCell out;
        const auto selected =
            detail::e2e_selection(mcfg, utilities, seed, spec, params, out.warnings);
        const WeightVector lambda_star = lambda_star_for_seed(spec, seed);
        std::vector<std::vector<double>> viewed;
        for (std::size_t i = 0; i < selected.size() && i < kViewCap; ++i)
          viewed.push_back(utilities[selected[i]]);
        out.cell.raw = viewed.empty() ? 0.0 : shf_utility_ratio(viewed, lambda_star, oracle);
        out.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return out;
      }));
    }
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      SeedCell out = futures[i].get();
      table[method].push_back(out.cell);
      warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
      manifest.wall_seconds["e2e/" + method + "/seed_" + std::to_string(cfg.seeds[i])] =
          out.wall;
    }
  }
  for (const std::string& w : warnings) std::cerr << "e2e: " << w << '\n';

  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / "e2e";
  std::filesystem::create_directories(dir);
  const std::string hash = config_hash(cfg);

  std::ofstream raw(dir / "ratios.csv", std::ios::trunc);
  if (!raw) throw std::runtime_error("cannot write " + (dir / "ratios.csv").string());
  raw << "# manifest " << hash << '\n';
  raw << "method,seed,shf_ratio\n";
  for (const std::string& method : methods)
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      raw << method << ',' << cfg.seeds[i] << ',' << format_double(table[method][i].raw)
          << '\n';
  raw.close();

  std::ofstream tab(dir / "table.csv", std::ios::trunc);
  if (!tab) throw std::runtime_error("cannot write " + (dir / "table.csv").string());
  tab << "# manifest " << hash << '\n';
  tab << "method,mean_shf_ratio,std_shf_ratio,seeds\n";
  for (const std::string& method : methods) {
    std::vector<double> clamped;
    for (const Cell& c : table[method]) {
      if (c.raw > 1.0)
        std::cerr << "e2e: ratio " << format_double(c.raw) << " for " << method
                  << " exceeds 1; clamped in the table (raw kept in ratios.csv)\n";
      clamped.push_back(std::min(c.raw, 1.0));
    }
    double mean = 0.0;
    for (double v : clamped) mean += v;
    mean /= static_cast<double>(clamped.size());
    double var = 0.0;
    for (double v : clamped) var += (v - mean) * (v - mean);
    const double sd =
        clamped.size() > 1 ? std::sqrt(var / static_cast<double>(clamped.size() - 1)) : 0.0;
    tab << method << ',' << format_double(mean) << ',' << format_double(sd) << ','
        << clamped.size() << '\n';
  }
  tab.close();

  manifest.artifacts.push_back("e2e/ratios.csv");
  manifest.artifacts.push_back("e2e/table.csv");
  manifest.save(std::filesystem::path(cfg.out_dir) / "manifest_e2e.json");
  return manifest;
}

/// Recompute the metric trace of one stored archive.
inline RunManifest cmd_metrics(const ExperimentConfig& cfg, const std::string& archive_path) {
  cfg.validate();
  if (archive_path.empty())
    throw std::invalid_argument("metrics: an archive path is required");
  const Problem problem = problem_by_id(cfg.problem);
  const ShfVectorSpec spec = problem.configuration(cfg.bounds);
  const std::string hash = config_hash(cfg);
  RunManifest manifest = make_manifest(cfg);

  const ArchiveFile file = read_archive(archive_path);
  if (file.manifest_hash != dense_stage_hash(cfg))
    std::cerr << "metrics: archive hash " << file.manifest_hash
              << " differs from this config\n";

  const OfflineOracle oracle = build_offline_oracle(problem, spec);
  const WeightVector lambda_star = lambda_star_for_seed(spec, file.archive.seed);
  const auto trace = metric_trace(file.archive, oracle, lambda_star, cfg.upsilon);

  const std::filesystem::path out =
      std::filesystem::path(archive_path).parent_path() / "metrics.csv";
  write_metrics_csv(out, trace, hash);
  manifest.artifacts.push_back(out.string());
  manifest.save(std::filesystem::path(cfg.out_dir) / "manifest_metrics.json");
  return manifest;
}

/// Build and freeze the offline reference frontier as a JSON artifact.
inline RunManifest cmd_oracle_build(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = problem_by_id(cfg.problem);
  const ShfVectorSpec spec = problem.configuration(cfg.bounds);
  const std::string hash = config_hash(cfg);
  RunManifest manifest = make_manifest(cfg);

  const OfflineOracle oracle = build_offline_oracle(problem, spec);
  for (const std::string& w : oracle.warnings) std::cerr << "oracle: " << w << '\n';

  nlohmann::json j;
  j["type"] = "oracle";
  j["manifest_hash"] = hash;
  j["problem"] = cfg.problem;
  j["bounds"] = cfg.bounds;
  j["budget"] = 10000;
  j["seed"] = 0;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : oracle.points) pts.push_back(detail::vector_to_json(p));
  j["points"] = pts;
  nlohmann::json utils = nlohmann::json::array();
  for (const auto& u : oracle.utilities) utils.push_back(detail::vector_to_json(u));
  j["utilities"] = utils;
  j["soft_index"] = oracle.soft_index;
  j["hard_index"] = oracle.hard_index;
  j["worst_fill_soft"] = oracle.worst_fill_soft;
  j["worst_fill_hard"] = oracle.worst_fill_hard;
  j["warnings"] = oracle.warnings;

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path path =
      std::filesystem::path(cfg.out_dir) / ("oracle_" + cfg.problem + ".json");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';

  manifest.artifacts.push_back("oracle_" + cfg.problem + ".json");
  manifest.save(std::filesystem::path(cfg.out_dir) / "manifest_oracle.json");
  return manifest;
}

}  // namespace mosh

#endif  // MOSH_EXPERIMENT_HPP
