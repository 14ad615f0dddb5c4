/**
 * @file metrics.hpp
 * @brief Soft-hard evaluation metrics over sampled objective vectors.
 *
 * All metrics compare against a fixed offline reference frontier (a
 * seeded noiseless grid scan, nondominated-filtered) so that traces are
 * comparable across methods and reruns.
 */
#ifndef MOSH_METRICS_HPP
#define MOSH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosh/bench.hpp"
#include "mosh/dense.hpp"
#include "mosh/pareto.hpp"
#include "mosh/rng.hpp"
#include "mosh/scalarize.hpp"
#include "mosh/shf.hpp"

namespace mosh {

/// Soft and hard acceptance regions: upper-right orthants at the bounds.
struct RegionSets {
  std::vector<double> r_soft;  ///< (alpha_{1,S}, ..., alpha_{L,S})
  std::vector<double> r_hard;

  static RegionSets from_spec(const ShfVectorSpec& spec) {
    RegionSets r;
    for (std::size_t l = 0; l < spec.size(); ++l) {
      r.r_soft.push_back(spec[l].alpha_soft);
      r.r_hard.push_back(spec[l].alpha_hard);
    }
    return r;
  }

  bool in_soft(const std::vector<double>& y) const { return member_(y, r_soft); }
  bool in_hard(const std::vector<double>& y) const { return member_(y, r_hard); }

 private:
  static bool member_(const std::vector<double>& y, const std::vector<double>& r) {
    if (y.size() != r.size()) return false;
    for (std::size_t l = 0; l < r.size(); ++l)
      if (y[l] < r[l]) return false;
    return true;
  }
};

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

/**
 * @brief Offline reference frontier for a (problem, bounds) pair.
 *
 * d <= 2 uses a uniform grid, higher dimensions a scrambled
 * low-discrepancy set, about 10^4 noiseless evaluations either way, then
 * a nondominated filter. Construction fails if the hard region ends up
 * empty; an empty soft region is recorded as a warning (tight soft bounds
 * legitimately push past the attainable frontier).
 */
struct OfflineOracle {
  RegionSets regions;
  ShfVectorSpec spec;
  ScalarizeParams params;
  std::vector<std::vector<double>> points;     ///< nondominated objective vectors
  std::vector<std::vector<double>> utilities;  ///< shf images of points
  std::vector<std::size_t> soft_index, hard_index;
  double worst_fill_soft = 0.0;  ///< substitution value when C misses the region
  double worst_fill_hard = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

inline double region_diameter(const std::vector<std::vector<double>>& pts,
                              const std::vector<std::size_t>& idx) {
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      best = std::max(best, euclidean(pts[idx[a]], pts[idx[b]]));
  return best;
}

}  // namespace detail

inline OfflineOracle build_offline_oracle(const Problem& problem, const ShfVectorSpec& spec,
                                          Scalarization kind = Scalarization::chebyshev,
                                          std::uint64_t seed = 0,
                                          std::size_t budget = 10000) {
  OfflineOracle oracle;
  oracle.regions = RegionSets::from_spec(spec);
  oracle.spec = spec;
  oracle.params = default_scalarize_params(spec, kind);

  std::vector<std::vector<double>> inputs;
  if (problem.dim() <= 2) {
    const std::size_t side =
        static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(budget),
                                                       1.0 / problem.dim())));
    std::vector<std::size_t> idx(problem.dim(), 0);
    const std::size_t total = [&] {
      std::size_t n = 1;
      for (std::size_t i = 0; i < problem.dim(); ++i) n *= side;
      return n;
    }();
    for (std::size_t g = 0; g < total; ++g) {
      std::vector<double> x(problem.dim());
      for (std::size_t i = 0; i < problem.dim(); ++i)
        x[i] = problem.lower[i] +
               (problem.upper[i] - problem.lower[i]) * static_cast<double>(idx[i]) /
                   static_cast<double>(side - 1);
      inputs.push_back(std::move(x));
      for (std::size_t i = problem.dim(); i-- > 0;) {
        if (++idx[i] < side) break;
        idx[i] = 0;
      }
    }
  } else {
    HaltonSampler halton(problem.dim(), derive_seed(seed, "oracle-grid"));
    for (auto& p : halton.take(budget))
      inputs.push_back(scale_to_box(p, problem.lower, problem.upper));
  }

  std::vector<std::vector<double>> values;
  values.reserve(inputs.size());
  for (const auto& x : inputs) values.push_back(problem.evaluate(x));
  oracle.points = nondominated_filter(values);

  oracle.utilities.reserve(oracle.points.size());
  for (const auto& y : oracle.points)
    oracle.utilities.push_back(shf_eval_vector(spec, y));
  for (std::size_t j = 0; j < oracle.points.size(); ++j) {
    if (oracle.regions.in_soft(oracle.points[j])) oracle.soft_index.push_back(j);
    if (oracle.regions.in_hard(oracle.points[j])) oracle.hard_index.push_back(j);
  }
  if (oracle.hard_index.empty())
    throw std::runtime_error(
        "build_offline_oracle: no reference point satisfies the hard bounds for " +
        problem.id);
  if (oracle.soft_index.empty())
    oracle.warnings.push_back(
        "soft region empty on the reference frontier; soft fill distance reports 0");
  oracle.worst_fill_soft = detail::region_diameter(oracle.points, oracle.soft_index);
  oracle.worst_fill_hard = detail::region_diameter(oracle.points, oracle.hard_index);
  return oracle;
}

namespace detail {

/// sup over the region's reference points of the distance to C_r, with the
/// worst-case substitution when C misses the region entirely.
inline double region_fill(const std::vector<std::vector<double>>& candidates,
                          const OfflineOracle& oracle,
                          const std::vector<std::size_t>& region_index,
                          bool candidate_in_region(const RegionSets&,
                                                   const std::vector<double>&),
                          double worst_case) {
  if (region_index.empty()) return 0.0;
  std::vector<const std::vector<double>*> c_region;
  for (const auto& y : candidates)
    if (candidate_in_region(oracle.regions, y)) c_region.push_back(&y);
  if (c_region.empty()) return worst_case;
  double fill = 0.0;
  for (std::size_t j : region_index) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto* c : c_region)
      nearest = std::min(nearest, euclidean(*c, oracle.points[j]));
    fill = std::max(fill, nearest);
  }
  return fill;
}

}  // namespace detail

/// upsilon-weighted soft/hard fill distance of C against the oracle frontier.
inline double soft_hard_fill_distance(const std::vector<std::vector<double>>& candidates,
                                      const OfflineOracle& oracle, double upsilon = 0.75) {
  const double fill_soft = detail::region_fill(
      candidates, oracle, oracle.soft_index,
      [](const RegionSets& r, const std::vector<double>& y) { return r.in_soft(y); },
      oracle.worst_fill_soft);
  const double fill_hard = detail::region_fill(
      candidates, oracle, oracle.hard_index,
      [](const RegionSets& r, const std::vector<double>& y) { return r.in_hard(y); },
      oracle.worst_fill_hard);
  return upsilon * fill_soft + (1.0 - upsilon) * fill_hard;
}

/// Weighted fraction of samples inside each region (closed bounds).
inline double positive_samples_ratio(const std::vector<std::vector<double>>& candidates,
                                     const RegionSets& regions, double upsilon = 0.75) {
  if (candidates.empty())
    throw std::invalid_argument("positive_samples_ratio: needs at least one sample");
  double in_soft = 0.0, in_hard = 0.0;
  for (const auto& y : candidates) {
    if (regions.in_soft(y)) in_soft += 1.0;
    if (regions.in_hard(y)) in_hard += 1.0;
  }
  const double n = static_cast<double>(candidates.size());
  return upsilon * in_soft / n + (1.0 - upsilon) * in_hard / n;
}

struct HypervolumePair {
  double soft = 0.0;
  double hard = 0.0;
};

/// Hypervolume of the nondominated candidates against r_S and r_H.
inline HypervolumePair soft_hard_hypervolume(const std::vector<std::vector<double>>& candidates,
                                             const RegionSets& regions,
                                             const HypervolumeOptions& opts = {}) {
  const auto front = nondominated_filter(candidates);
  return HypervolumePair{hypervolume(front, regions.r_soft, opts),
                         hypervolume(front, regions.r_hard, opts)};
}

/// Density of samples around the soft corner: sum of inverse distances.
inline double soft_distance_weighted_score(const std::vector<std::vector<double>>& candidates,
                                           const RegionSets& regions) {
  const double floor = 1e-9;
  double score = 0.0;
  for (const auto& y : candidates) score += 1.0 / std::max(euclidean(y, regions.r_soft), floor);
  return score;
}

/**
 * @brief Shifted utility ratio of a candidate set under one preference.
 *
 * (max_C s - min_D s) / (max_D s - min_D s) with scores over the
 * hard-feasible reference points; 0 when C holds no hard-feasible point.
 * Not clamped: a candidate that beats the reference set scores above 1
 * (reports clamp, persisted values stay raw).
 */
inline double shf_utility_ratio(const std::vector<std::vector<double>>& candidate_utilities,
                                const WeightVector& lambda_star,
                                const std::vector<std::vector<double>>& reference_utilities,
                                const ScalarizeParams& params) {
  double ref_max = kNegInf, ref_min = std::numeric_limits<double>::infinity();
  for (const auto& u : reference_utilities) {
    if (!hard_feasible(u)) continue;
    const double s = scalarize(u, lambda_star, params);
    ref_max = std::max(ref_max, s);
    ref_min = std::min(ref_min, s);
  }
  if (is_neg_inf(ref_max))
    throw std::invalid_argument("shf_utility_ratio: no hard-feasible reference point");
  double best = kNegInf;
  for (const auto& u : candidate_utilities) {
    if (!hard_feasible(u)) continue;
    best = std::max(best, scalarize(u, lambda_star, params));
  }
  if (is_neg_inf(best)) return 0.0;
  const double denom = ref_max - ref_min;
  if (!(denom > 0.0)) return best >= ref_max ? 1.0 : 0.0;
  // A feasible candidate below every reference carries no measurable utility.
  // Flooring keeps the ratio nonnegative and prefix traces monotone.
  return std::max(0.0, (best - ref_min) / denom);
}

/// Ratio against the offline oracle's hard-feasible frontier points.
inline double shf_utility_ratio(const std::vector<std::vector<double>>& candidate_utilities,
                                const WeightVector& lambda_star, const OfflineOracle& oracle) {
  std::vector<std::vector<double>> refs;
  refs.reserve(oracle.hard_index.size());
  for (std::size_t j : oracle.hard_index) refs.push_back(oracle.utilities[j]);
  return shf_utility_ratio(candidate_utilities, lambda_star, refs, oracle.params);
}

/// Mean shifted utility ratio over a sample of preferences.
inline double bayes_utility_ratio(const std::vector<std::vector<double>>& candidate_utilities,
                                  const std::vector<WeightVector>& lambda_draws,
                                  const OfflineOracle& oracle) {
  if (lambda_draws.empty())
    throw std::invalid_argument("bayes_utility_ratio: needs at least one preference draw");
  double acc = 0.0;
  for (const WeightVector& lam : lambda_draws)
    acc += shf_utility_ratio(candidate_utilities, lam, oracle);
  return acc / static_cast<double>(lambda_draws.size());
}

struct MetricRow {
  std::size_t iter = 0;
  double fill = 0.0;
  double pos_ratio = 0.0;
  double hv_soft = 0.0;
  double hv_hard = 0.0;
  double dws = 0.0;
  double shf_ratio = 0.0;
};

/// Per-iteration metrics over archive prefixes, under one simulated DM.
inline std::vector<MetricRow> metric_trace(const SampleArchive& archive,
                                           const OfflineOracle& oracle,
                                           const WeightVector& lambda_star,
                                           double upsilon = 0.75) {
  std::vector<MetricRow> rows;
  std::vector<std::vector<double>> objectives, utilities;
  for (const SampleRecord& rec : archive.records) {
    objectives.push_back(rec.y);
    utilities.push_back(rec.u);
    MetricRow row;
    row.iter = rec.t;
    row.fill = soft_hard_fill_distance(objectives, oracle, upsilon);
    row.pos_ratio = positive_samples_ratio(objectives, oracle.regions, upsilon);
    const HypervolumePair hv = soft_hard_hypervolume(objectives, oracle.regions);
    row.hv_soft = hv.soft;
    row.hv_hard = hv.hard;
    row.dws = soft_distance_weighted_score(objectives, oracle.regions);
    row.shf_ratio = shf_utility_ratio(utilities, lambda_star, oracle);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mosh

#endif  // MOSH_METRICS_HPP
