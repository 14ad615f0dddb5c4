/**
 * @file dense.hpp
 * @brief Dense Pareto-frontier sampling: random-scalarization Bayesian
 *        optimization under soft-hard utilities, plus the step-1 baselines.
 *
 * Every stochastic ingredient of a run is drawn from a stream keyed by
 * (seed, purpose, iteration), so a run can be replayed from a partial
 * archive and continue bit-identically.
 */
#ifndef MOSH_DENSE_HPP
#define MOSH_DENSE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mosh/bench.hpp"
#include "mosh/rng.hpp"
#include "mosh/scalarize.hpp"
#include "mosh/shf.hpp"
#include "mosh/surrogate.hpp"

namespace mosh {

/// One evaluated sample: iteration, input, noisy objectives, utilities,
/// and the preference weights active when it was chosen.
struct SampleRecord {
  std::size_t t = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> u;
  WeightVector lambda;
};

struct SampleArchive {
  std::uint64_t seed = 0;
  std::vector<SampleRecord> records;
};

struct DenseConfig {
  std::size_t iterations = 100;    ///< T, adaptive evaluations after warm-up
  std::size_t n_init = 0;          ///< 0 selects 2 (d + 1)
  std::size_t acq_candidates = 256;
  ShfVectorSpec spec;
  Scalarization scalarization = Scalarization::chebyshev;
  std::uint64_t seed = 1;
  GpConfig gp;

  std::size_t warmup_count(std::size_t dim) const {
    return n_init != 0 ? n_init : 2 * (dim + 1);
  }

  void validate() const {
    spec.validate();
    if (warmup_count(1) < 2)
      throw std::invalid_argument("DenseConfig: n_init must be at least 2");
    if (acq_candidates < 256)
      throw std::invalid_argument("DenseConfig: acq_candidates must be at least 256");
  }
};

/// Noisy black box: (x, record index) -> objective vector.
using Oracle = std::function<std::vector<double>(const std::vector<double>&, std::size_t)>;
/// Streaming consumer for freshly evaluated records (persistence hook).
using RecordSink = std::function<void(const SampleRecord&)>;

/// Confidence width sqrt(0.125 log(2t + 1)); defined from t = 1.
inline double beta_schedule(std::size_t t) {
  if (t < 1) throw std::invalid_argument("beta_schedule: iterations start at 1");
  return std::sqrt(0.125 * std::log(2.0 * static_cast<double>(t) + 1.0));
}

/// Optimistic scalarized utility from posterior moments:
/// s_lambda(shf(mu + sqrt(beta_t) sigma)).
inline double acquisition_from_moments(const std::vector<double>& mean,
                                       const std::vector<double>& stddev,
                                       const WeightVector& lambda, std::size_t t,
                                       const ShfVectorSpec& spec,
                                       const ScalarizeParams& params) {
  const double width = std::sqrt(beta_schedule(t));
  std::vector<double> optimistic(mean.size());
  for (std::size_t l = 0; l < mean.size(); ++l)
    optimistic[l] = mean[l] + width * stddev[l];
  return scalarize(shf_eval_vector(spec, optimistic), lambda, params);
}

/// Acquisition of x under the current per-objective posteriors.
inline double acquisition(const std::vector<GpModel>& gps, const WeightVector& lambda,
                          const std::vector<double>& x, std::size_t t,
                          const ShfVectorSpec& spec, const ScalarizeParams& params) {
  std::vector<double> mean(gps.size()), stddev(gps.size());
  for (std::size_t l = 0; l < gps.size(); ++l) {
    const PosteriorMoments m = gps[l].posterior(x);
    mean[l] = m.mean;
    stddev[l] = m.stddev;
  }
  return acquisition_from_moments(mean, stddev, lambda, t, spec, params);
}

namespace detail {

/// Hard-violation-tolerant score used when every candidate is -inf:
/// linear utility with each violated coordinate charged -10 per objective.
inline double fallback_score(const std::vector<double>& u, const WeightVector& lambda) {
  const double penalty = -10.0 * static_cast<double>(u.size());
  double acc = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l)
    acc += lambda[l] * (is_neg_inf(u[l]) ? penalty : u[l]);
  return acc;
}

inline std::vector<double> clamp_to_box(std::vector<double> x, const std::vector<double>& lo,
                                        const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

}  // namespace detail

struct AcquisitionChoice {
  std::vector<double> x;
  double score = 0.0;
  bool used_fallback = false;
};

/**
 * @brief Seeded pool search for argmax acquisition.
 *
 * Pool = acq_candidates scrambled low-discrepancy points, plus the top 5
 * archived inputs under the current acquisition, each perturbed by 8
 * Gaussian jitters of scale 0.02 x box width (clamped to the box). The
 * argmax is deterministic; ties keep the lowest candidate index. If every
 * candidate is hard-infeasible even optimistically, the choice falls back
 * to a penalized linear utility so early iterations still move.
 */
inline AcquisitionChoice maximize_acquisition(const std::vector<GpModel>& gps,
                                              const WeightVector& lambda, std::size_t t,
                                              const DenseConfig& cfg,
                                              const std::vector<double>& lo,
                                              const std::vector<double>& hi,
                                              const SampleArchive& archive,
                                              const ScalarizeParams& params) {
  const std::size_t dim = lo.size();
  HaltonSampler halton(dim, derive_seed(cfg.seed, "acq-pool", t));
  std::vector<std::vector<double>> pool;
  pool.reserve(cfg.acq_candidates + 5 * 8);
  for (auto& p : halton.take(cfg.acq_candidates))
    pool.push_back(scale_to_box(p, lo, hi));

  if (!archive.records.empty()) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(archive.records.size());
    for (std::size_t r = 0; r < archive.records.size(); ++r)
      ranked.emplace_back(-acquisition(gps, lambda, archive.records[r].x, t, cfg.spec, params),
                          r);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Rng jitter(derive_seed(cfg.seed, "acq-jitter", t));
    const std::size_t top = std::min<std::size_t>(5, ranked.size());
    for (std::size_t r = 0; r < top; ++r) {
      const auto& anchor = archive.records[ranked[r].second].x;
      for (int j = 0; j < 8; ++j) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i)
          x[i] = anchor[i] + 0.02 * (hi[i] - lo[i]) * jitter.normal();
        pool.push_back(detail::clamp_to_box(std::move(x), lo, hi));
      }
    }
  }

  AcquisitionChoice choice;
  double best = kNegInf;
  std::size_t best_idx = 0;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const double score = acquisition(gps, lambda, pool[c], t, cfg.spec, params);
    if (score > best) {
      best = score;
      best_idx = c;
    }
  }
  if (is_neg_inf(best)) {
    choice.used_fallback = true;
    const double width = std::sqrt(beta_schedule(t));
    best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < pool.size(); ++c) {
      std::vector<double> optimistic(gps.size());
      for (std::size_t l = 0; l < gps.size(); ++l) {
        const PosteriorMoments m = gps[l].posterior(pool[c]);
        optimistic[l] = m.mean + width * m.stddev;
      }
      const double score =
          detail::fallback_score(shf_eval_vector(cfg.spec, optimistic), lambda);
      if (score > best) {
        best = score;
        best_idx = c;
      }
    }
  }
  choice.x = pool[best_idx];
  choice.score = best;
  return choice;
}

namespace detail {

/// Warm-up inputs are a fixed function of (seed, dim, count) so replayed
/// runs regenerate them identically.
inline std::vector<std::vector<double>> warmup_points(const DenseConfig& cfg,
                                                      const std::vector<double>& lo,
                                                      const std::vector<double>& hi) {
  HaltonSampler halton(lo.size(), derive_seed(cfg.seed, "warmup"));
  std::vector<std::vector<double>> pts;
  for (auto& p : halton.take(cfg.warmup_count(lo.size())))
    pts.push_back(scale_to_box(p, lo, hi));
  return pts;
}

inline void replay_into(const SampleArchive* resume, SampleArchive& archive,
                        const std::function<void(const SampleRecord&)>& absorb) {
  if (resume == nullptr) return;
  for (const SampleRecord& rec : resume->records) {
    if (rec.t != archive.records.size() + 1)
      throw std::invalid_argument("resume archive is not contiguous from t = 1");
    absorb(rec);
  }
}

}  // namespace detail

/**
 * @brief The dense sampler: warm-up, then T rounds of lambda draw,
 *        acquisition argmax, oracle call, posterior update.
 *
 * @param resume optional partial archive to replay (no oracle calls) before
 *        continuing; the continuation is bit-identical to an uninterrupted run.
 */
inline SampleArchive mosh_dense(const DenseConfig& cfg, const Problem& problem,
                                const Oracle& oracle, const RecordSink& sink = {},
                                const SampleArchive* resume = nullptr) {
  const std::vector<double>&lo = problem.lower, &hi = problem.upper;
  const std::size_t L = problem.num_objectives;
  const std::size_t n_init = cfg.warmup_count(problem.dim());
  const ScalarizeParams params = default_scalarize_params(cfg.spec, cfg.scalarization);

  SampleArchive archive;
  archive.seed = cfg.seed;
  std::vector<GpModel> gps(L, GpModel(lo, hi, cfg.gp));

  auto absorb = [&](const SampleRecord& rec) {
    for (std::size_t l = 0; l < L; ++l) gps[l].add(rec.x, rec.y[l]);
    archive.records.push_back(rec);
  };
  detail::replay_into(resume, archive, absorb);

  const auto init_pts = detail::warmup_points(cfg, lo, hi);
  const WeightVector warmup_lambda = uniform_weights(L);
  const std::size_t total = n_init + cfg.iterations;

  for (std::size_t t = archive.records.size() + 1; t <= total; ++t) {
    SampleRecord rec;
    rec.t = t;
    if (t <= n_init) {
      rec.x = init_pts[t - 1];
      rec.lambda = warmup_lambda;
    } else {
      Rng lambda_rng(derive_seed(cfg.seed, "lambda", t));
      rec.lambda = sample_lambda(cfg.spec, lambda_rng);
      rec.x = maximize_acquisition(gps, rec.lambda, t, cfg, lo, hi, archive, params).x;
    }
    rec.y = oracle(rec.x, t);
    rec.u = shf_eval_vector(cfg.spec, rec.y);
    absorb(rec);
    if (sink) sink(rec);
  }
  return archive;
}

/// Uniform random search with the same warm-up, for step-1 comparisons.
inline SampleArchive random_baseline(const DenseConfig& cfg, const Problem& problem,
                                     const Oracle& oracle, const RecordSink& sink = {},
                                     const SampleArchive* resume = nullptr) {
  const std::vector<double>&lo = problem.lower, &hi = problem.upper;
  const std::size_t n_init = cfg.warmup_count(problem.dim());

  SampleArchive archive;
  archive.seed = cfg.seed;
  auto absorb = [&](const SampleRecord& rec) { archive.records.push_back(rec); };
  detail::replay_into(resume, archive, absorb);

  const auto init_pts = detail::warmup_points(cfg, lo, hi);
  const WeightVector lambda = uniform_weights(problem.num_objectives);
  const std::size_t total = n_init + cfg.iterations;

  for (std::size_t t = archive.records.size() + 1; t <= total; ++t) {
    SampleRecord rec;
    rec.t = t;
    rec.lambda = lambda;
    if (t <= n_init) {
      rec.x = init_pts[t - 1];
    } else {
      Rng rng(derive_seed(cfg.seed, "random-x", t));
      rec.x.resize(problem.dim());
      for (std::size_t i = 0; i < rec.x.size(); ++i) rec.x[i] = rng.uniform(lo[i], hi[i]);
    }
    rec.y = oracle(rec.x, t);
    rec.u = shf_eval_vector(cfg.spec, rec.y);
    absorb(rec);
    if (sink) sink(rec);
  }
  return archive;
}

/// Uniform grid {l_i + j delta : j < ceil((u_i - l_i) / delta)} per axis.
inline std::vector<std::vector<double>> uniform_grid(const std::vector<double>& lo,
                                                     const std::vector<double>& hi,
                                                     double delta,
                                                     std::size_t cap = 1000000) {
  if (!(delta > 0.0)) throw std::invalid_argument("uniform_grid: delta must be positive");
  const std::size_t dim = lo.size();
  std::vector<std::size_t> counts(dim);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) {
    counts[i] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((hi[i] - lo[i]) / delta)));
    if (counts[i] > cap / total)
      throw std::runtime_error("uniform_grid: grid would hold more than " +
                               std::to_string(cap) + " points");
    total *= counts[i];
  }
  std::vector<std::vector<double>> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t g = 0; g < total; ++g) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = lo[i] + delta * static_cast<double>(idx[i]);
    grid.push_back(std::move(x));
    for (std::size_t i = dim; i-- > 0;) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return grid;
}

/// Same-step grid on [0,1]^L kept to the simplex (sum = 1), renormalized.
inline std::vector<WeightVector> simplex_grid(std::size_t L, double delta) {
  const auto cube = uniform_grid(std::vector<double>(L, 0.0), std::vector<double>(L, 1.0),
                                 delta);
  std::vector<WeightVector> weights;
  for (const auto& w : cube) {
    double total = 0.0;
    for (double v : w) total += v;
    if (std::abs(total - 1.0) > 1e-9) continue;
    WeightVector lam(w);
    for (double& v : lam) v /= total;
    weights.push_back(std::move(lam));
  }
  if (weights.empty())
    throw std::invalid_argument("simplex_grid: no grid point lies on the simplex");
  return weights;
}

struct DiscreteGreedyReport {
  SampleArchive archive;
  double wall_seconds = 0.0;
  std::size_t grid_size = 0;
  std::size_t lambda_count = 0;
};

/**
 * @brief Grid-restricted greedy max-min baseline.
 *
 * Scores come from a noiseless lookup table over the whole grid (the
 * worst-case ratio needs per-lambda maxima over all of X); the noisy
 * oracle is charged only for the points actually selected. Each round
 * adds the unselected hard-feasible grid point maximizing
 * min_lambda (max s - s_min) / (s_max - s_min); once no feasible
 * candidate remains, a penalized linear utility keeps the run moving.
 */
inline DiscreteGreedyReport discrete_greedy(const DenseConfig& cfg, const Problem& problem,
                                            const Oracle& oracle, double delta,
                                            const RecordSink& sink = {},
                                            std::size_t grid_cap = 1000000) {
  const auto start = std::chrono::steady_clock::now();
  const ScalarizeParams params = default_scalarize_params(cfg.spec, cfg.scalarization);
  const std::size_t L = problem.num_objectives;

  const auto grid = uniform_grid(problem.lower, problem.upper, delta, grid_cap);
  const auto lambdas = simplex_grid(L, delta);
  const std::size_t n = grid.size();

  std::vector<std::vector<double>> utility(n);
  std::vector<char> feasible(n, 0);
  for (std::size_t g = 0; g < n; ++g) {
    utility[g] = shf_eval_vector(cfg.spec, problem.evaluate(grid[g]));
    feasible[g] = hard_feasible(utility[g]) ? 1 : 0;
  }

  // per-lambda scores on the grid, with ranges over the feasible points
  std::vector<std::size_t> kept_lambda;
  std::vector<std::vector<double>> score;   // [kept lambda][grid point]
  std::vector<double> s_min, s_range;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    std::vector<double> s(n, kNegInf);
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t g = 0; g < n; ++g) {
      if (!feasible[g]) continue;
      s[g] = scalarize(utility[g], lambdas[j], params);
      mn = std::min(mn, s[g]);
      mx = std::max(mx, s[g]);
    }
    if (!(mx - mn > 0.0)) continue;  // constant over the feasible grid
    kept_lambda.push_back(j);
    score.push_back(std::move(s));
    s_min.push_back(mn);
    s_range.push_back(mx - mn);
  }
  const bool any_feasible =
      std::any_of(feasible.begin(), feasible.end(), [](char f) { return f != 0; });
  const std::size_t m = kept_lambda.size();

  SampleArchive archive;
  archive.seed = cfg.seed;
  std::vector<double> cur(m, kNegInf);  // best score so far per kept lambda
  std::vector<char> selected(n, 0);
  const WeightVector uniform = uniform_weights(L);

  auto absorb = [&](const SampleRecord& rec) {
    const auto clean = shf_eval_vector(cfg.spec, problem.evaluate(rec.x));
    for (std::size_t jj = 0; jj < m; ++jj)
      cur[jj] = std::max(cur[jj], scalarize(clean, lambdas[kept_lambda[jj]], params));
    archive.records.push_back(rec);
  };

  const std::size_t n_init = cfg.warmup_count(problem.dim());
  const auto init_pts = detail::warmup_points(cfg, problem.lower, problem.upper);
  const std::size_t total = n_init + cfg.iterations;

  for (std::size_t t = 1; t <= total; ++t) {
    SampleRecord rec;
    rec.t = t;
    rec.lambda = uniform;
    if (t <= n_init) {
      rec.x = init_pts[t - 1];
    } else {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_g = n;
      for (std::size_t g = 0; g < n; ++g) {
        if (selected[g] || (any_feasible && m > 0 && !feasible[g])) continue;
        double value;
        if (any_feasible && m > 0 && feasible[g]) {
          value = std::numeric_limits<double>::infinity();
          for (std::size_t jj = 0; jj < m; ++jj) {
            const double covered = std::max(cur[jj], score[jj][g]);
            value = std::min(value, (covered - s_min[jj]) / s_range[jj]);
          }
        } else {
          value = detail::fallback_score(utility[g], uniform);
        }
        if (value > best) {
          best = value;
          best_g = g;
        }
      }
      if (best_g == n) {
        // every feasible point already selected; fall back over the rest
        for (std::size_t g = 0; g < n; ++g) {
          if (selected[g]) continue;
          const double value = detail::fallback_score(utility[g], uniform);
          if (value > best) {
            best = value;
            best_g = g;
          }
        }
      }
      if (best_g == n) break;  // grid exhausted
      selected[best_g] = 1;
      rec.x = grid[best_g];
    }
    rec.y = oracle(rec.x, t);
    rec.u = shf_eval_vector(cfg.spec, rec.y);
    absorb(rec);
    if (sink) sink(rec);
  }

  DiscreteGreedyReport report;
  report.archive = std::move(archive);
  report.grid_size = n;
  report.lambda_count = lambdas.size();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace mosh

#endif  // MOSH_DENSE_HPP
