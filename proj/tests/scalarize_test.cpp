#include "mosh/scalarize.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace mosh;

ScalarizeParams cheb(std::vector<double> utopia, double gamma = 0.05) {
  return ScalarizeParams{Scalarization::chebyshev, std::move(utopia), gamma};
}

TEST(Chebyshev, WorkedExample) {
  // L=2, z*=(2,2), gamma=0.05, lambda=(0.5,0.5), u=(1,0):
  // -max(0.5, 1.0) - 0.05 * 3 = -1.15
  const double s = chebyshev_scalarize({1.0, 0.0}, {0.5, 0.5}, cheb({2.0, 2.0}));
  EXPECT_NEAR(s, -1.15, 1e-12);
}

TEST(Chebyshev, NonPositiveBelowUtopia) {
  Rng rng(derive_seed(5, "cheb-sign"));
  const ScalarizeParams p = cheb({1.51, 1.51});
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> u = {rng.uniform(-1.0, 1.51), rng.uniform(-1.0, 1.51)};
    const double a = rng.uniform(0.01, 0.99);
    EXPECT_LE(scalarize(u, {a, 1.0 - a}, p), 0.0);
  }
}

TEST(Chebyshev, MonotoneInEachCoordinateBelowUtopia) {
  Rng rng(derive_seed(6, "cheb-mono"));
  const ScalarizeParams p = cheb({2.0, 2.0, 2.0});
  for (int i = 0; i < 200; ++i) {
    std::vector<double> u = {rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0),
                             rng.uniform(-1.0, 2.0)};
    const double a = rng.uniform(0.1, 0.8), b = rng.uniform(0.0, 1.0 - a - 0.05);
    const WeightVector lam = {a, b, 1.0 - a - b};
    const double before = chebyshev_scalarize(u, lam, p);
    const std::size_t l = static_cast<std::size_t>(rng.integer(3));
    u[l] += rng.uniform(0.0, 2.0 - u[l]);
    EXPECT_GE(chebyshev_scalarize(u, lam, p), before - 1e-12);
  }
}

TEST(Chebyshev, NegInfPropagates) {
  const ScalarizeParams p = cheb({2.0, 2.0});
  EXPECT_TRUE(is_neg_inf(chebyshev_scalarize({kNegInf, 1.0}, {0.5, 0.5}, p)));
  EXPECT_TRUE(is_neg_inf(chebyshev_scalarize({1.0, kNegInf}, {1.0, 0.0}, p)));
}

TEST(Linear, DotProductAndPropagation) {
  EXPECT_DOUBLE_EQ(linear_scalarize({0.7, 123.0}, {1.0, 0.0}), 0.7);
  EXPECT_DOUBLE_EQ(linear_scalarize({1.0, 3.0}, {0.25, 0.75}), 0.25 + 2.25);
  EXPECT_TRUE(is_neg_inf(linear_scalarize({kNegInf, 3.0}, {0.5, 0.5})));
  // even a zero weight must not mask a hard violation
  EXPECT_TRUE(is_neg_inf(linear_scalarize({kNegInf, 3.0}, {0.0, 1.0})));
}

TEST(Weights, Validation) {
  EXPECT_NO_THROW(validate_weights({0.25, 0.75}));
  EXPECT_NO_THROW(validate_weights(uniform_weights(7)));
  EXPECT_THROW(validate_weights({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(validate_weights({-0.1, 1.1}), std::invalid_argument);
  EXPECT_THROW(validate_weights({}), std::invalid_argument);
}

TEST(DefaultUtopia, SitsAboveSaturation) {
  ShfVectorSpec vs;
  vs.per_objective = {ShfSpec{0.8, 0.3, 2.0, 0.5}, ShfSpec{0.9, 0.1, 2.0, 0.5}};
  const std::vector<double> z = default_utopia(vs);
  ASSERT_EQ(z.size(), 2u);
  EXPECT_DOUBLE_EQ(z[0], 1.51);
  EXPECT_DOUBLE_EQ(z[1], 1.51);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_GT(z[l], shf_saturation(vs[l]));
}

TEST(SampleLambda, ProducesValidWeights) {
  ShfVectorSpec vs;
  vs.per_objective = {ShfSpec{0.9, 0.6, 2.0, 0.5}, ShfSpec{0.8, 0.5, 2.0, 0.5},
                      ShfSpec{0.7, 0.2, 2.0, 0.5}};
  Rng rng(derive_seed(42, "lambda"));
  for (int i = 0; i < 500; ++i) {
    const WeightVector w = sample_lambda(vs, rng);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NO_THROW(validate_weights(w));
  }
}

TEST(SampleLambda, Deterministic) {
  ShfVectorSpec vs;
  vs.per_objective = {ShfSpec{0.9, 0.6, 2.0, 0.5}, ShfSpec{0.8, 0.5, 2.0, 0.5}};
  Rng a(derive_seed(9, "lambda"));
  Rng b(derive_seed(9, "lambda"));
  for (int i = 0; i < 50; ++i) {
    const WeightVector wa = sample_lambda(vs, a);
    const WeightVector wb = sample_lambda(vs, b);
    EXPECT_EQ(wa, wb);
  }
}

TEST(SampleLambda, LocationFollowsSoftBounds) {
  // objective 0 has a much larger soft bound, so it should carry more
  // weight on average
  ShfVectorSpec vs;
  vs.per_objective = {ShfSpec{0.9, 0.85, 2.0, 0.5}, ShfSpec{0.2, 0.15, 2.0, 0.5}};
  Rng rng(derive_seed(13, "lambda-loc"));
  double mean0 = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) mean0 += sample_lambda(vs, rng)[0];
  mean0 /= n;
  EXPECT_GT(mean0, 0.6);
}

TEST(SampleLambda, ClampKeepsWeightsPositive) {
  // soft bound far below zero forces negative draws, the floor rescues them
  ShfVectorSpec vs;
  vs.per_objective = {ShfSpec{-3.0, -4.0, 2.0, 0.5}, ShfSpec{1.0, 0.5, 2.0, 0.5}};
  Rng rng(derive_seed(21, "lambda-floor"));
  for (int i = 0; i < 200; ++i) {
    const WeightVector w = sample_lambda(vs, rng);
    EXPECT_GT(w[0], 0.0);
    EXPECT_GT(w[1], 0.0);
    EXPECT_NO_THROW(validate_weights(w));
  }
}

}  // namespace
