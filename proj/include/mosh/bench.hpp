/**
 * @file bench.hpp
 * @brief Benchmark black boxes: Branin-Currin and the four bar truss.
 *
 * Every objective is served negated and min-max normalized to [0, 1] so
 * larger is better and the named bound configurations (expressed in
 * normalized units) apply directly. Normalization extrema were computed
 * once by the grid scans in the test suite and are frozen here; the tests
 * re-derive them to guard against drift.
 */
#ifndef MOSH_BENCH_HPP
#define MOSH_BENCH_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosh/rng.hpp"
#include "mosh/shf.hpp"

namespace mosh {

/// Branin on the unit square (inputs rescaled to the classic domain).
inline double branin_raw(double x1, double x2) {
  const double a = 15.0 * x1 - 5.0;
  const double b = 15.0 * x2;
  const double pi = std::numbers::pi;
  const double term = b - 5.1 / (4.0 * pi * pi) * a * a + 5.0 / pi * a - 6.0;
  return term * term + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(a) + 10.0;
}

/// Currin exponential on the unit square; the x2 = 0 limit is taken.
inline double currin_raw(double x1, double x2) {
  const double factor = x2 == 0.0 ? 1.0 : 1.0 - std::exp(-1.0 / (2.0 * x2));
  const double numer = 2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
  const double denom = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
  return factor * numer / denom;
}

/// Four bar truss structural volume (RE21 first objective).
inline double truss_volume_raw(const std::vector<double>& x) {
  const double length = 200.0;
  return length * (2.0 * x[0] + std::sqrt(2.0) * x[1] + std::sqrt(x[2]) + x[3]);
}

/// Four bar truss joint displacement (RE21 second objective).
inline double truss_displacement_raw(const std::vector<double>& x) {
  const double force = 10.0;
  const double length = 200.0;
  const double modulus = 2e5;
  const double r2 = std::sqrt(2.0);
  return force * length / modulus *
         (2.0 / x[0] + 2.0 * r2 / x[1] - 2.0 * r2 / x[2] + 2.0 / x[3]);
}

/// Frozen normalization extrema (see the grid-scan tests).
struct ObjectiveRange {
  double min = 0.0;
  double max = 1.0;
};

inline constexpr ObjectiveRange kBraninRange{0.39829076520672047, 308.12909601160663};
inline constexpr ObjectiveRange kCurrinRange{1.1804080208620997, 13.798692300625911};
inline constexpr ObjectiveRange kTrussVolumeRange{1237.8414230005442, 2994.9382989376327};
inline constexpr ObjectiveRange kTrussDisplacementRange{0.0027614237491539674,
                                                        0.050571909584179363};

/// Minimization value -> maximization score in [0, 1] (1 at the minimum).
inline double normalize_objective(double raw, const ObjectiveRange& range) {
  return (range.max - raw) / (range.max - range.min);
}

/**
 * @brief A benchmark problem: box, normalized objectives, noise levels,
 *        named bound configurations.
 */
struct Problem {
  std::string id;
  std::vector<double> lower, upper;
  std::size_t num_objectives = 0;
  std::vector<double> noise_sigma;
  std::map<std::string, ShfVectorSpec> bound_configurations;
  std::function<std::vector<double>(const std::vector<double>&)> objectives;

  std::size_t dim() const { return lower.size(); }

  bool in_box(const std::vector<double>& x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
  }

  /// Noiseless normalized objective vector; out-of-box input throws.
  std::vector<double> evaluate(const std::vector<double>& x) const {
    if (!in_box(x))
      throw std::invalid_argument("Problem::evaluate: input outside the box for " + id);
    return objectives(x);
  }

  const ShfVectorSpec& configuration(const std::string& name) const {
    const auto it = bound_configurations.find(name);
    if (it == bound_configurations.end())
      throw std::invalid_argument("Problem: unknown bound configuration '" + name +
                                  "' for " + id);
    return it->second;
  }
};

namespace detail {

inline ShfVectorSpec make_config(double a0s, double a0h, double a1s, double a1h) {
  ShfVectorSpec spec;
  spec.per_objective = {ShfSpec{a0s, a0h}, ShfSpec{a1s, a1h}};
  spec.validate();
  return spec;
}

}  // namespace detail

inline Problem branin_currin() {
  Problem p;
  p.id = "branin_currin";
  p.lower = {0.0, 0.0};
  p.upper = {1.0, 1.0};
  p.num_objectives = 2;
  p.noise_sigma = {0.01, 0.01};
  p.bound_configurations = {
      {"complete_mid", detail::make_config(0.988, 0.943, 0.856, 0.618)},
      {"complete_top", detail::make_config(0.969, 0.943, 0.935, 0.618)},
      {"complete_bot", detail::make_config(0.998, 0.943, 0.697, 0.618)},
      {"top_mid", detail::make_config(0.969, 0.940, 0.915, 0.856)},
      {"bot_mid", detail::make_config(0.996, 0.975, 0.737, 0.658)},
  };
  p.objectives = [](const std::vector<double>& x) {
    return std::vector<double>{
        normalize_objective(branin_raw(x[0], x[1]), kBraninRange),
        normalize_objective(currin_raw(x[0], x[1]), kCurrinRange)};
  };
  return p;
}

inline Problem four_bar_truss() {
  Problem p;
  p.id = "four_bar_truss";
  const double r2 = std::sqrt(2.0);
  p.lower = {1.0, r2, r2, 1.0};
  p.upper = {3.0, 3.0, 3.0, 3.0};
  p.num_objectives = 2;
  p.noise_sigma = {0.01, 0.01};
  p.bound_configurations = {
      {"narrow_mid", detail::make_config(0.62, 0.45, 0.72, 0.55)},
      {"narrow_bot", detail::make_config(0.70, 0.45, 0.65, 0.55)},
      {"narrow_top", detail::make_config(0.55, 0.45, 0.78, 0.55)},
      {"bot_mid", detail::make_config(0.86, 0.70, 0.48, 0.25)},
      {"top_mid", detail::make_config(0.43, 0.20, 0.85, 0.70)},
  };
  p.objectives = [](const std::vector<double>& x) {
    return std::vector<double>{
        normalize_objective(truss_volume_raw(x), kTrussVolumeRange),
        normalize_objective(truss_displacement_raw(x), kTrussDisplacementRange)};
  };
  return p;
}

inline Problem problem_by_id(const std::string& id) {
  if (id == "branin_currin") return branin_currin();
  if (id == "four_bar_truss") return four_bar_truss();
  throw std::invalid_argument("problem_by_id: unknown problem '" + id + "'");
}

/**
 * @brief Seeded noisy oracle around a problem.
 *
 * Evaluation t draws its perturbation from a stream keyed by
 * (seed, "noise", t), so replaying any record index reproduces the same
 * observation regardless of evaluation order.
 */
class NoisyOracle {
 public:
  NoisyOracle(const Problem& problem, std::uint64_t seed)
      : problem_(&problem), seed_(seed) {}

  std::vector<double> evaluate(const std::vector<double>& x, std::uint64_t record_index) const {
    std::vector<double> y = problem_->evaluate(x);
    Rng rng(derive_seed(seed_, "noise", record_index));
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += problem_->noise_sigma[i] * rng.normal();
    return y;
  }

  const Problem& problem() const { return *problem_; }

 private:
  const Problem* problem_;
  std::uint64_t seed_;
};

}  // namespace mosh

#endif  // MOSH_BENCH_HPP
