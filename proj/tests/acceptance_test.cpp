// Release gate: one check per shipped guarantee, each printing a PASS/FAIL
// line with its measured values and wall time. Tolerances and time limits
// are pinned here, not configurable; run via ctest or directly.
#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include <mosh/experiment.hpp>

namespace fs = std::filesystem;
using namespace mosh;

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void gate_line(int number, const char* fmt, ...) {
  const bool ok = !::testing::Test::HasFailure();
  std::printf("[%2d] %s  ", number, ok ? "PASS" : "FAIL");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// Shared benchmark runs: the expensive dense archives are produced once and
// reused by every check that needs them. Seeds run in parallel.
// ---------------------------------------------------------------------------

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5, 6};
constexpr std::size_t kIterations = 100;

SampleArchive run_step1(const std::string& problem_id, const std::string& bounds,
                        const std::string& method, std::size_t iterations,
                        std::uint64_t seed, double delta, double* wall = nullptr) {
  ExperimentConfig cfg;
  cfg.problem = problem_id;
  cfg.bounds = bounds;
  cfg.method = method;
  cfg.iterations = iterations;
  cfg.delta = delta;
  const Problem problem = problem_by_id(problem_id);
  const DenseConfig dcfg = make_dense_config(cfg, problem, seed);
  NoisyOracle noisy(problem, seed);
  const Oracle oracle = [&](const std::vector<double>& x, std::size_t t) {
    return noisy.evaluate(x, t);
  };
  const Timer timer;
  SampleArchive archive;
  if (method == "mosh_dense" || method == "mobo_rs_linear") {
    archive = mosh_dense(dcfg, problem, oracle);
  } else if (method == "random") {
    archive = random_baseline(dcfg, problem, oracle);
  } else {
    DiscreteGreedyReport report = discrete_greedy(dcfg, problem, oracle, delta);
    if (wall) *wall = report.wall_seconds;
    return report.archive;
  }
  if (wall) *wall = timer.seconds();
  return archive;
}

const std::vector<SampleArchive>& shared_runs(const std::string& problem_id,
                                              const std::string& bounds,
                                              const std::string& method) {
  static std::map<std::tuple<std::string, std::string, std::string>,
                  std::vector<SampleArchive>>
      cache;
  const auto key = std::make_tuple(problem_id, bounds, method);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<std::future<SampleArchive>> futures;
  for (std::uint64_t seed : kSeeds)
    futures.push_back(std::async(std::launch::async, [=] {
      return run_step1(problem_id, bounds, method, kIterations, seed, 0.05);
    }));
  std::vector<SampleArchive> runs;
  for (auto& f : futures) runs.push_back(f.get());
  return cache.emplace(key, std::move(runs)).first->second;
}

const OfflineOracle& shared_oracle(const std::string& problem_id, const std::string& bounds) {
  static std::map<std::pair<std::string, std::string>, OfflineOracle> cache;
  const auto key = std::make_pair(problem_id, bounds);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const Problem problem = problem_by_id(problem_id);
  return cache.emplace(key, build_offline_oracle(problem, problem.configuration(bounds)))
      .first->second;
}

std::vector<std::vector<double>> objective_rows(const SampleArchive& archive) {
  std::vector<std::vector<double>> ys;
  ys.reserve(archive.records.size());
  for (const SampleRecord& rec : archive.records) ys.push_back(rec.y);
  return ys;
}

std::vector<std::vector<double>> utility_rows(const SampleArchive& archive) {
  std::vector<std::vector<double>> us;
  us.reserve(archive.records.size());
  for (const SampleRecord& rec : archive.records) us.push_back(rec.u);
  return us;
}

// ---------------------------------------------------------------------------
// Random instances for the set-function checks
// ---------------------------------------------------------------------------

ShfVectorSpec gate_spec() {
  ShfVectorSpec spec;
  spec.per_objective = {ShfSpec{0.6, 0.1}, ShfSpec{0.7, 0.2}};
  return spec;
}

struct Instance {
  CoverageObjective obj;
};

Instance random_instance(std::uint64_t seed, std::size_t n, std::size_t m) {
  const ShfVectorSpec spec = gate_spec();
  const ScalarizeParams params = default_scalarize_params(spec);
  Rng rng(derive_seed(seed, "gate-instance"));
  std::vector<std::vector<double>> utilities(n);
  for (auto& u : utilities) {
    u = {rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
  }
  std::vector<WeightVector> lambdas;
  for (std::size_t i = 0; i < m; ++i) lambdas.push_back(sample_lambda(spec, rng));
  return Instance{CoverageObjective::build(utilities, lambdas, params)};
}

double min_coverage(const CoverageObjective& obj, const std::vector<std::size_t>& subset) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < obj.num_lambdas(); ++i)
    worst = std::min(worst, f_lambda(obj, subset, i));
  return worst;
}

std::vector<std::size_t> mask_to_subset(std::uint32_t mask) {
  std::vector<std::size_t> subset;
  for (std::size_t c = 0; mask != 0; ++c, mask >>= 1)
    if (mask & 1u) subset.push_back(c);
  return subset;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Gate, C01_SoftHardAnchorsBitExact) {
  const Timer timer;
  Rng rng(41);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    ShfSpec s;
    s.alpha_hard = rng.uniform(-5.0, 5.0);
    s.alpha_soft = s.alpha_hard + rng.uniform(0.1, 3.0);
    s.zeta = rng.uniform(1.1, 4.0);
    s.beta_slope = rng.uniform(0.0, 2.0);
    s.validate();

    ASSERT_EQ(shf_eval(s, s.alpha_hard), 0.0);
    ASSERT_EQ(shf_eval(s, s.alpha_soft), 1.0);
    ASSERT_EQ(shf_eval(s, std::nextafter(s.alpha_hard, -1e9)), kNegInf);

    // saturation value mirrored from its definition
    const double tau = s.alpha_hard + s.zeta * (s.alpha_soft - s.alpha_hard);
    const double t_tau = (tau - s.alpha_hard) / (s.alpha_soft - s.alpha_hard) * 0.5;
    const double saturation = 1.0 + 2.0 * s.beta_slope * (t_tau - 0.5);
    ASSERT_EQ(shf_eval(s, tau), saturation);
    ASSERT_EQ(shf_eval(s, tau + 1.0), saturation);

    // interior branches stay on their lines
    const double mid_lo = 0.5 * (s.alpha_hard + s.alpha_soft);
    ASSERT_EQ(shf_eval(s, mid_lo),
              2.0 * ((mid_lo - s.alpha_hard) / (s.alpha_soft - s.alpha_hard) * 0.5));
    const double mid_hi = 0.5 * (s.alpha_soft + tau);
    if (mid_hi < tau) {
      const double t_mid = (mid_hi - s.alpha_hard) / (s.alpha_soft - s.alpha_hard) * 0.5;
      ASSERT_EQ(shf_eval(s, mid_hi), 1.0 + 2.0 * s.beta_slope * (t_mid - 0.5));
    }
    ++checked;
  }
  const double elapsed = timer.seconds();
  EXPECT_EQ(checked, 100);
  EXPECT_LT(elapsed, 1.0);
  gate_line(1, "utility transform anchors bit-exact on %d/100 random specs (%.3fs, limit 1s)",
            checked, elapsed);
}

TEST(Gate, C02_DiminishingReturnsExhaustive) {
  const Timer timer;
  constexpr double kTol = 1e-12;
  constexpr std::size_t kN = 8;
  double worst_slack = std::numeric_limits<double>::infinity();
  long long comparisons = 0;

  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const Instance instance = random_instance(1000 + inst, kN, 3);
    const CoverageObjective& obj = instance.obj;
    ASSERT_EQ(obj.num_points(), kN);

    for (std::size_t i = 0; i < obj.num_lambdas(); ++i) {
      // coverage of every subset, via the production evaluator
      std::vector<double> F(1u << kN);
      for (std::uint32_t mask = 0; mask < (1u << kN); ++mask)
        F[mask] = f_lambda(obj, mask_to_subset(mask), i);

      for (std::uint32_t B = 0; B < (1u << kN); ++B) {
        for (std::uint32_t A = B;; A = (A - 1) & B) {  // all submasks of B
          for (std::size_t s = 0; s < kN; ++s) {
            const std::uint32_t bit = 1u << s;
            if (B & bit) continue;
            const double gain_small = F[A | bit] - F[A];
            const double gain_large = F[B | bit] - F[B];
            const double slack = gain_small - gain_large;
            worst_slack = std::min(worst_slack, slack);
            ASSERT_GE(slack, -kTol);
            ++comparisons;
          }
          if (A == 0) break;
        }
      }
    }
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 30.0);
  gate_line(2,
            "diminishing returns exhaustive on 50 instances, %lld comparisons, "
            "worst slack %.2e >= -1e-12 (%.1fs, limit 30s)",
            comparisons, worst_slack, elapsed);
}

TEST(Gate, C03_GreedyWithinNemhauserBound) {
  const Timer timer;
  constexpr double kTol = 1e-9;
  const double factor = 1.0 - 1.0 / std::exp(1.0);
  double worst_margin = std::numeric_limits<double>::infinity();

  for (std::uint64_t inst = 0; inst < 50; ++inst) {
    const std::size_t n = 6 + inst % 7;   // 6..12
    const std::size_t k = 1 + inst % 4;   // 1..4
    const Instance instance = random_instance(2000 + inst, n, 1);
    const CoverageObjective& obj = instance.obj;

    const std::vector<std::size_t> greedy = greedy_maxmin(obj, k);
    const double greedy_value = f_lambda(obj, greedy, 0);

    double opt = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > k) continue;
      opt = std::max(opt, f_lambda(obj, mask_to_subset(mask), 0));
    }
    const double margin = greedy_value - (factor * opt - kTol);
    worst_margin = std::min(worst_margin, margin);
    ASSERT_GE(greedy_value, factor * opt - kTol);
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 60.0);
  gate_line(3,
            "greedy >= (1-1/e) OPT - 1e-9 on 50 single-preference instances, "
            "worst margin %.3e (%.1fs, limit 60s)",
            worst_margin, elapsed);
}

TEST(Gate, C04_SaturateMatchesExhaustiveMaxMin) {
  const Timer timer;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::size_t largest_cover = 0;

  for (std::uint64_t inst = 0; inst < 30; ++inst) {
    const std::size_t n = 6 + inst % 5;  // 6..10
    const std::size_t m = 2 + inst % 4;  // 2..5
    const std::size_t k = 1 + inst % 3;  // 1..3
    const Instance instance = random_instance(3000 + inst, n, m);
    const CoverageObjective& obj = instance.obj;

    const SaturateResult sat = saturate(obj, k);
    const double achieved = min_coverage(obj, sat.chosen);

    double opt = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) > k) continue;
      opt = std::max(opt, min_coverage(obj, mask_to_subset(mask)));
    }

    ASSERT_GE(achieved, opt);  // no tolerance: the bicriterion guarantee
    ASSERT_LE(sat.chosen.size(), sat.size_cap);
    ASSERT_LE(static_cast<double>(sat.size_cap), sat.psi * static_cast<double>(k));
    worst_gap = std::min(worst_gap, achieved - opt);
    largest_cover = std::max(largest_cover, sat.chosen.size());
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 120.0);
  gate_line(4,
            "saturate min-coverage >= exhaustive max-min on 30 instances, "
            "worst gap %+.3e, max cover %zu within cap (%.1fs, limit 120s)",
            worst_gap, largest_cover, elapsed);
}

TEST(Gate, C05_PosteriorMatchesDirectSolve) {
  const Timer timer;
  constexpr double kTol = 1e-6;
  double worst_err = 0.0;

  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    const std::size_t d = 1 + inst % 3;
    const std::size_t n = 8 + (inst * 3) % 57;  // 8..64
    Rng rng(derive_seed(4000 + inst, "gate-gp"));

    const std::vector<double> lo(d, 0.0), hi(d, 1.0);
    std::vector<std::vector<double>> xs(n, std::vector<double>(d));
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        xs[i][j] = rng.uniform(0.0, 1.0);
        acc += std::sin(3.0 * xs[i][j]) + 0.3 * xs[i][j];
      }
      ys[i] = acc + 0.05 * rng.normal();
    }

    GpModel gp(lo, hi);
    for (std::size_t i = 0; i < n; ++i) gp.add(xs[i], ys[i]);
    const double ls = 0.4 * std::sqrt(static_cast<double>(d));
    const double sv = 1.7;
    gp.set_hyperparameters(ls, sv);

    // direct solve with the same normalization and kernel
    double shift = 0.0;
    for (double y : ys) shift += y;
    shift /= static_cast<double>(n);
    double var = 0.0;
    for (double y : ys) var += (y - shift) * (y - shift);
    var /= static_cast<double>(n);
    const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;

    const double noise = GpConfig{}.noise_variance;
    const auto kernel = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d; ++j) sq += (a[j] - b[j]) * (a[j] - b[j]);
      return sv * std::exp(-sq / (2.0 * ls * ls));
    };
    Eigen::MatrixXd K(n, n);
    Eigen::VectorXd yn(n);
    for (std::size_t i = 0; i < n; ++i) {
      yn[static_cast<Eigen::Index>(i)] = (ys[i] - shift) / scale;
      for (std::size_t j = 0; j < n; ++j)
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(xs[i], xs[j]);
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += noise;
    }
    const Eigen::LDLT<Eigen::MatrixXd> solver(K);

    for (int probe = 0; probe < 16; ++probe) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(0.0, 1.0);
      Eigen::VectorXd ks(n);
      for (std::size_t i = 0; i < n; ++i)
        ks[static_cast<Eigen::Index>(i)] = kernel(x, xs[i]);
      const double mean = ks.dot(solver.solve(yn)) * scale + shift;
      const double var_n = std::max(0.0, sv - ks.dot(solver.solve(ks)));
      const double stddev = std::sqrt(var_n) * scale;

      const PosteriorMoments m = gp.posterior(x);
      worst_err = std::max({worst_err, std::abs(m.mean - mean), std::abs(m.stddev - stddev)});
      ASSERT_NEAR(m.mean, mean, kTol);
      ASSERT_NEAR(m.stddev, stddev, kTol);
    }
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 30.0);
  gate_line(5,
            "posterior matches direct solve on 20 datasets (n <= 64), "
            "worst |err| %.2e <= 1e-6 (%.1fs, limit 30s)",
            worst_err, elapsed);
}

TEST(Gate, C06_HypervolumeExactVsMonteCarlo) {
  const Timer timer;
  double worst_rel = 0.0;

  // staircase with area 0.5 x 1.0 + 0.5 x 0.5
  const std::vector<std::vector<double>> staircase = {{0.5, 1.0}, {1.0, 0.5}};
  ASSERT_EQ(hypervolume(staircase, {0.0, 0.0}), 0.75);

  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(derive_seed(5000 + i, "gate-hv"));
    const std::size_t count = 3 + i % 10;
    std::vector<std::vector<double>> pts(count);
    for (auto& p : pts) p = {rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0)};
    const auto front = nondominated_filter(pts);

    const std::vector<double> ref = {0.0, 0.0};
    const double exact = hypervolume(front, ref);
    HypervolumeOptions opts;
    opts.seed = i;
    const double mc = hypervolume_monte_carlo(front, ref, opts);
    const double rel = std::abs(exact - mc) / exact;
    worst_rel = std::max(worst_rel, rel);
    ASSERT_LE(rel, 0.01);
  }
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 30.0);
  gate_line(6,
            "exact sweep vs 2^17-sample Monte Carlo within 1%% on 20 frontiers "
            "(worst %.3f%%), staircase exactly 0.75 (%.1fs, limit 30s)",
            100.0 * worst_rel, elapsed);
}

TEST(Gate, C07_BayesUtilityRatioConverges) {
  const Timer timer;
  const auto& runs = shared_runs("branin_currin", "complete_mid", "mosh_dense");
  const OfflineOracle& oracle = shared_oracle("branin_currin", "complete_mid");
  const ShfVectorSpec spec = problem_by_id("branin_currin").configuration("complete_mid");
  const std::size_t warm = 6;  // 2 (d + 1) with d = 2

  struct SeedOutcome {
    bool monotone = true;
    double at10 = 0.0, at100 = 0.0;
  };
  std::vector<std::future<SeedOutcome>> futures;
  for (std::size_t si = 0; si < kSeeds.size(); ++si) {
    futures.push_back(std::async(std::launch::async, [&, si] {
      const SampleArchive& archive = runs[si];
      Rng rng(derive_seed(kSeeds[si], "lambda_star"));
      std::vector<WeightVector> draws;
      for (int i = 0; i < 100; ++i) draws.push_back(sample_lambda(spec, rng));

      SeedOutcome out;
      std::vector<std::vector<double>> prefix;
      double prev = 0.0;
      for (std::size_t i = 0; i < archive.records.size(); ++i) {
        prefix.push_back(archive.records[i].u);
        const double r = bayes_utility_ratio(prefix, draws, oracle);
        if (r < prev) out.monotone = false;
        prev = r;
        if (i + 1 == warm + 10) out.at10 = r;
      }
      out.at100 = prev;
      return out;
    }));
  }

  int monotone_seeds = 0;
  double mean10 = 0.0, mean100 = 0.0;
  for (auto& f : futures) {
    const SeedOutcome out = f.get();
    if (out.monotone) ++monotone_seeds;
    EXPECT_TRUE(out.monotone);
    mean10 += out.at10 / static_cast<double>(kSeeds.size());
    mean100 += out.at100 / static_cast<double>(kSeeds.size());
  }
  EXPECT_GT(mean100, mean10);
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 600.0);
  gate_line(7,
            "bayes utility ratio monotone on %d/6 seeds, mean %.4f at T=10 -> "
            "%.4f at T=100 (%.1fs, limit 600s)",
            monotone_seeds, mean10, mean100, elapsed);
}

TEST(Gate, C08_DenseSamplerBeatsRandomBaseline) {
  const Timer timer;
  struct Comparison {
    double pos_mosh = 0.0, pos_rand = 0.0, dws_mosh = 0.0, dws_rand = 0.0;
  };
  const auto compare = [&](const std::string& problem_id, const std::string& bounds) {
    const auto& mosh_runs = shared_runs(problem_id, bounds, "mosh_dense");
    const auto& rand_runs = shared_runs(problem_id, bounds, "random");
    const RegionSets regions =
        RegionSets::from_spec(problem_by_id(problem_id).configuration(bounds));
    Comparison c;
    const double n = static_cast<double>(kSeeds.size());
    for (std::size_t si = 0; si < kSeeds.size(); ++si) {
      const auto ym = objective_rows(mosh_runs[si]);
      const auto yr = objective_rows(rand_runs[si]);
      c.pos_mosh += positive_samples_ratio(ym, regions) / n;
      c.pos_rand += positive_samples_ratio(yr, regions) / n;
      c.dws_mosh += soft_distance_weighted_score(ym, regions) / n;
      c.dws_rand += soft_distance_weighted_score(yr, regions) / n;
    }
    EXPECT_GT(c.pos_mosh, c.pos_rand) << problem_id << "/" << bounds;
    EXPECT_GT(c.dws_mosh, c.dws_rand) << problem_id << "/" << bounds;
    return c;
  };

  const Comparison bc = compare("branin_currin", "complete_mid");
  const Comparison truss = compare("four_bar_truss", "narrow_mid");
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 1200.0);
  gate_line(8,
            "adaptive sampler beats random at T=100: positive ratio %.3f>%.3f and "
            "%.3f>%.3f, density score %.0f>%.0f and %.0f>%.0f (%.1fs, limit 1200s)",
            bc.pos_mosh, bc.pos_rand, truss.pos_mosh, truss.pos_rand, bc.dws_mosh,
            bc.dws_rand, truss.dws_mosh, truss.dws_rand, elapsed);
}

TEST(Gate, C09_FiveViewedPointsReachTargetUtility) {
  const Timer timer;
  const auto& runs = shared_runs("branin_currin", "complete_mid", "mosh_dense");
  const OfflineOracle& oracle = shared_oracle("branin_currin", "complete_mid");
  const ShfVectorSpec spec = problem_by_id("branin_currin").configuration("complete_mid");
  const ScalarizeParams params = default_scalarize_params(spec);

  double mean = 0.0, lowest = std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < kSeeds.size(); ++si) {
    const auto utilities = utility_rows(runs[si]);
    const auto lambdas = sparse_lambdas_for_seed(spec, kSeeds[si], 100);
    const CoverageObjective obj = CoverageObjective::build(utilities, lambdas, params);
    const SaturateResult sat = saturate(obj, 5);

    const WeightVector lambda_star = lambda_star_for_seed(spec, kSeeds[si]);
    std::vector<std::vector<double>> viewed;
    for (std::size_t i = 0; i < sat.chosen.size() && i < 5; ++i)
      viewed.push_back(utilities[obj.point_index[sat.chosen[i]]]);
    const double ratio = shf_utility_ratio(viewed, lambda_star, oracle);
    mean += ratio / static_cast<double>(kSeeds.size());
    lowest = std::min(lowest, ratio);
  }
  EXPECT_GE(mean, 0.95);
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 600.0);
  gate_line(9,
            "two-step pipeline after <= 5 viewed points: mean utility ratio %.4f "
            ">= 0.95 (lowest seed %.4f) (%.1fs, limit 600s)",
            mean, lowest, elapsed);
}

TEST(Gate, C10_FinerGridImprovesRatioAtHigherCost) {
  const Timer timer;
  const RegionSets regions =
      RegionSets::from_spec(problem_by_id("branin_currin").configuration("complete_mid"));

  double pos_fine = 0.0, pos_coarse = 0.0, wall_fine = 0.0, wall_coarse = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    double w = 0.0;
    const SampleArchive fine =
        run_step1("branin_currin", "complete_mid", "discrete_greedy", 60, seed, 0.05, &w);
    wall_fine += w;
    pos_fine += positive_samples_ratio(objective_rows(fine), regions) / 3.0;

    const SampleArchive coarse =
        run_step1("branin_currin", "complete_mid", "discrete_greedy", 60, seed, 0.10, &w);
    wall_coarse += w;
    pos_coarse += positive_samples_ratio(objective_rows(coarse), regions) / 3.0;
  }
  EXPECT_GE(pos_fine, pos_coarse);
  EXPECT_GT(wall_fine, wall_coarse);
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 900.0);
  gate_line(10,
            "grid step 0.05 vs 0.10: positive ratio %.4f >= %.4f, wall %.4fs > %.4fs "
            "(%.1fs, limit 900s)",
            pos_fine, pos_coarse, wall_fine, wall_coarse, elapsed);
}

TEST(Gate, C11_PipelineRerunsAreByteIdentical) {
  const Timer timer;

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  const fs::path base = fs::temp_directory_path() /
                        ("mosh_gate_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const auto run_into = [&](const fs::path& out) {
    ExperimentConfig cfg;
    cfg.problem = "branin_currin";
    cfg.bounds = "complete_bot";
    cfg.iterations = 5;
    cfg.k = 3;
    cfg.lambda_count = 20;
    cfg.seeds = {1, 2};
    cfg.out_dir = out.string();
    cmd_dense(cfg);
    cmd_sparse(cfg);
  };
  run_into(base / "a");
  run_into(base / "b");

  // every archive, CSV, and selection document must match byte for byte;
  // manifests carry wall-clock times and are exempt
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), base / "a");
    const std::string name = entry.path().filename().string();
    if (name.rfind("manifest_", 0) == 0) continue;
    const fs::path twin = base / "b" / rel;
    ASSERT_TRUE(fs::exists(twin)) << rel;
    EXPECT_EQ(slurp(entry.path()), slurp(twin)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 9u);  // 2 seeds x (archive + metrics + selection + trace) + summary
  fs::remove_all(base);

  const double elapsed = timer.seconds();
  gate_line(11, "fresh-directory rerun byte-identical across %zu artifacts (%.1fs)",
            compared, elapsed);
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
