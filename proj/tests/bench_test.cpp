// Benchmark sanity: frozen normalization extrema are re-derived from the
// same grid scans that produced them, and the noisy oracle's stream is
// checked for determinism and the right variance.
#include "mosh/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using mosh::Problem;

TEST(BraninCurrinTest, FrozenExtremaMatchGridScan) {
  double bmin = 1e300, bmax = -1e300, cmin = 1e300, cmax = -1e300;
  const int n = 512;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = static_cast<double>(i) / (n - 1);
      const double x2 = static_cast<double>(j) / (n - 1);
      const double b = mosh::branin_raw(x1, x2);
      const double c = mosh::currin_raw(x1, x2);
      bmin = std::min(bmin, b);
      bmax = std::max(bmax, b);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  EXPECT_NEAR(bmin, mosh::kBraninRange.min, 1e-6);
  EXPECT_NEAR(bmax, mosh::kBraninRange.max, 1e-6);
  EXPECT_NEAR(cmin, mosh::kCurrinRange.min, 1e-6);
  EXPECT_NEAR(cmax, mosh::kCurrinRange.max, 1e-6);
}

TEST(BraninCurrinTest, NormalizedValuesCoverUnitInterval) {
  const Problem p = mosh::branin_currin();
  double best0 = 0.0, best1 = 0.0;
  const int n = 128;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::vector<double> x{static_cast<double>(i) / (n - 1),
                                  static_cast<double>(j) / (n - 1)};
      const auto y = p.evaluate(x);
      ASSERT_EQ(y.size(), 2u);
      EXPECT_GE(y[0], -1e-12);
      EXPECT_LE(y[0], 1.0 + 1e-12);
      EXPECT_GE(y[1], -1e-12);
      EXPECT_LE(y[1], 1.0 + 1e-12);
      best0 = std::max(best0, y[0]);
      best1 = std::max(best1, y[1]);
    }
  }
  // the coarse grid still gets close to each objective's optimum
  EXPECT_GT(best0, 0.99);
  EXPECT_GT(best1, 0.99);
}

TEST(BraninCurrinTest, CurrinLimitAtZeroIsFinite) {
  const double v = mosh::currin_raw(0.3, 0.0);
  EXPECT_TRUE(std::isfinite(v));
  // approaching x2 = 0 from above converges to the guarded value
  EXPECT_NEAR(mosh::currin_raw(0.3, 1e-9), v, 1e-6);
}

TEST(BraninCurrinTest, OutOfBoxThrows) {
  const Problem p = mosh::branin_currin();
  EXPECT_THROW(p.evaluate({-0.01, 0.5}), std::invalid_argument);
  EXPECT_THROW(p.evaluate({0.5, 1.01}), std::invalid_argument);
  EXPECT_THROW(p.evaluate({0.5}), std::invalid_argument);
}

TEST(FourBarTrussTest, FrozenExtremaMatchGridScan) {
  const Problem p = mosh::four_bar_truss();
  const int g = 20;
  double vmin = 1e300, vmax = -1e300, dmin = 1e300, dmax = -1e300;
  std::vector<double> x(4);
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      for (int c = 0; c < g; ++c)
        for (int d = 0; d < g; ++d) {
          const int idx[4] = {a, b, c, d};
          for (int k = 0; k < 4; ++k)
            x[k] = p.lower[k] + (p.upper[k] - p.lower[k]) * idx[k] / (g - 1);
          const double v = mosh::truss_volume_raw(x);
          const double dd = mosh::truss_displacement_raw(x);
          vmin = std::min(vmin, v);
          vmax = std::max(vmax, v);
          dmin = std::min(dmin, dd);
          dmax = std::max(dmax, dd);
        }
  EXPECT_NEAR(vmin, mosh::kTrussVolumeRange.min, 1e-6);
  EXPECT_NEAR(vmax, mosh::kTrussVolumeRange.max, 1e-6);
  EXPECT_NEAR(dmin, mosh::kTrussDisplacementRange.min, 1e-9);
  EXPECT_NEAR(dmax, mosh::kTrussDisplacementRange.max, 1e-9);
}

TEST(FourBarTrussTest, VolumeIncreasesWithCrossSections) {
  // raw volume grows in every coordinate
  const std::vector<double> base{1.5, 1.8, 1.8, 1.5};
  const double v0 = mosh::truss_volume_raw(base);
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> x = base;
    x[k] += 0.25;
    EXPECT_GT(mosh::truss_volume_raw(x), v0) << "coordinate " << k;
  }
}

TEST(FourBarTrussTest, BoxAndConfigurationsLoad) {
  const Problem p = mosh::four_bar_truss();
  ASSERT_EQ(p.dim(), 4u);
  EXPECT_EQ(p.lower[1], std::sqrt(2.0));
  EXPECT_EQ(p.upper[0], 3.0);
  for (const char* name : {"narrow_mid", "narrow_bot", "narrow_top", "bot_mid", "top_mid"}) {
    const auto& spec = p.configuration(name);
    ASSERT_EQ(spec.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(spec[i].alpha_hard, spec[i].alpha_soft);
  }
  EXPECT_THROW(p.configuration("nonexistent"), std::invalid_argument);
}

TEST(BenchProblemTest, AllConfigurationsValidateOnBothProblems) {
  for (const char* id : {"branin_currin", "four_bar_truss"}) {
    const Problem p = mosh::problem_by_id(id);
    EXPECT_EQ(p.bound_configurations.size(), 5u) << id;
    for (const auto& [name, spec] : p.bound_configurations) EXPECT_NO_THROW(spec.validate());
  }
  EXPECT_THROW(mosh::problem_by_id("unknown"), std::invalid_argument);
}

TEST(BenchProblemTest, NamedConfigurationValuesMatchTables) {
  const Problem bc = mosh::branin_currin();
  const auto& mid = bc.configuration("complete_mid");
  EXPECT_EQ(mid[0].alpha_soft, 0.988);
  EXPECT_EQ(mid[0].alpha_hard, 0.943);
  EXPECT_EQ(mid[1].alpha_soft, 0.856);
  EXPECT_EQ(mid[1].alpha_hard, 0.618);
  const Problem truss = mosh::four_bar_truss();
  const auto& narrow = truss.configuration("narrow_mid");
  EXPECT_EQ(narrow[0].alpha_soft, 0.62);
  EXPECT_EQ(narrow[0].alpha_hard, 0.45);
  EXPECT_EQ(narrow[1].alpha_soft, 0.72);
  EXPECT_EQ(narrow[1].alpha_hard, 0.55);
}

TEST(NoisyOracleTest, ZeroSigmaReturnsExactValues) {
  Problem p = mosh::branin_currin();
  p.noise_sigma = {0.0, 0.0};
  const mosh::NoisyOracle oracle(p, 42);
  const std::vector<double> x{0.4, 0.6};
  EXPECT_EQ(oracle.evaluate(x, 3), p.evaluate(x));
}

TEST(NoisyOracleTest, SameRecordIndexReproducesSameDraw) {
  const Problem p = mosh::branin_currin();
  const mosh::NoisyOracle oracle(p, 42);
  const std::vector<double> x{0.4, 0.6};
  EXPECT_EQ(oracle.evaluate(x, 7), oracle.evaluate(x, 7));
  EXPECT_NE(oracle.evaluate(x, 7), oracle.evaluate(x, 8));
  const mosh::NoisyOracle other(p, 43);
  EXPECT_NE(oracle.evaluate(x, 7), other.evaluate(x, 7));
}

TEST(NoisyOracleTest, SampleVarianceMatchesSigma) {
  Problem p = mosh::branin_currin();
  p.noise_sigma = {0.05, 0.02};
  const mosh::NoisyOracle oracle(p, 99);
  const std::vector<double> x{0.25, 0.75};
  const auto clean = p.evaluate(x);
  const int n = 10000;
  std::vector<double> mean(2, 0.0), m2(2, 0.0);
  for (int t = 0; t < n; ++t) {
    const auto y = oracle.evaluate(x, static_cast<std::uint64_t>(t));
    for (int i = 0; i < 2; ++i) {
      const double noise = y[i] - clean[i];
      const double delta = noise - mean[i];
      mean[i] += delta / (t + 1);
      m2[i] += delta * (noise - mean[i]);
    }
  }
  for (int i = 0; i < 2; ++i) {
    const double var = m2[i] / n;
    const double expected = p.noise_sigma[i] * p.noise_sigma[i];
    EXPECT_NEAR(var, expected, 0.05 * expected) << "objective " << i;
  }
}

}  // namespace
