/**
 * @file sparse.hpp
 * @brief Robust submodular sparsification of a dense sample set.
 *
 * Coverage of a candidate subset C under preference lambda_i is
 * F_i(C) = (max_{x in C} s_i(x) - min_{x in D} s_i(x)) /
 *          (max_{x in D} s_i(x) - min_{x in D} s_i(x)),
 * a normalized, monotone, submodular set function with F_i(D) = 1. The
 * shift by the per-lambda minimum gives ratio semantics to scalarization
 * scores that are negative (augmented Chebyshev always is). SATURATE
 * bisects a coverage level q and asks a greedy partial cover (GPC) for the
 * cheapest subset reaching the truncated average level q.
 */
#ifndef MOSH_SPARSE_HPP
#define MOSH_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosh/rng.hpp"
#include "mosh/scalarize.hpp"
#include "mosh/shf.hpp"

namespace mosh {

/**
 * @brief Immutable table of normalized coverage values.
 *
 * value[i][c] is F_i({c}); subset coverage is the running maximum. Points
 * with any hard-bound violation are excluded up front; lambdas whose
 * scores are constant across D are dropped with a note.
 */
struct CoverageObjective {
  std::vector<std::vector<double>> value;    ///< [lambda][point], each in [0, 1]
  std::vector<std::size_t> point_index;      ///< original archive index per point
  std::vector<WeightVector> lambdas;         ///< the kept lambdas
  std::vector<std::string> notes;            ///< dropped-lambda diagnostics

  std::size_t num_points() const { return point_index.size(); }
  std::size_t num_lambdas() const { return value.size(); }

  static CoverageObjective build(const std::vector<std::vector<double>>& utilities,
                                 const std::vector<WeightVector>& lambdas,
                                 const ScalarizeParams& params) {
    CoverageObjective obj;
    for (std::size_t i = 0; i < utilities.size(); ++i)
      if (hard_feasible(utilities[i])) obj.point_index.push_back(i);
    if (obj.point_index.empty())
      throw std::invalid_argument(
          "CoverageObjective: no hard-feasible point in the dense set");
    for (const WeightVector& lam : lambdas) {
      std::vector<double> s(obj.num_points());
      for (std::size_t c = 0; c < obj.num_points(); ++c)
        s[c] = scalarize(utilities[obj.point_index[c]], lam, params);
      const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
      const double lo = *mn_it, hi = *mx_it;
      const double denom = hi - lo;
      if (!(denom > 0.0)) {
        obj.notes.push_back("dropped constant-score lambda (denominator 0)");
        continue;
      }
      for (double& v : s) v = (v - lo) / denom;
      obj.value.push_back(std::move(s));
      obj.lambdas.push_back(lam);
    }
    if (obj.value.empty())
      throw std::invalid_argument("CoverageObjective: every lambda was degenerate");
    return obj;
  }
};

/// F_i(C); 0 for the empty set.
inline double f_lambda(const CoverageObjective& obj, const std::vector<std::size_t>& C,
                       std::size_t i) {
  double best = 0.0;
  for (std::size_t c : C) best = std::max(best, obj.value[i][c]);
  return best;
}

/// Truncated-average coverage (1/m) sum_i min(F_i(C), q).
inline double truncated_average(const CoverageObjective& obj,
                                const std::vector<std::size_t>& C, double q) {
  const std::size_t m = obj.num_lambdas();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += std::min(f_lambda(obj, C, i), q);
  return acc / static_cast<double>(m);
}

/**
 * @brief Greedy partial cover at level q.
 *
 * Adds the point of largest truncated-average gain (ties to the lowest
 * point index) until every F_i reaches q. Returns points in insertion
 * order. In exact arithmetic termination at the full set is guaranteed
 * because F_i(D) = 1 >= q for every kept lambda.
 */
inline std::vector<std::size_t> gpc(const CoverageObjective& obj, double q) {
  const std::size_t n = obj.num_points();
  const std::size_t m = obj.num_lambdas();
  std::vector<double> cur(m, 0.0);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> chosen;

  auto covered = [&]() {
    for (double v : cur)
      if (v < q) return false;
    return true;
  };

  while (!covered() && chosen.size() < n) {
    double best_gain = -1.0;
    std::size_t best_c = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      double gain = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double after = std::min(std::max(cur[i], obj.value[i][c]), q);
        gain += after - std::min(cur[i], q);
      }
      gain /= static_cast<double>(m);
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
      }
    }
    if (best_c == n) break;
    used[best_c] = true;
    chosen.push_back(best_c);
    for (std::size_t i = 0; i < m; ++i)
      cur[i] = std::max(cur[i], obj.value[i][best_c]);
  }
  if (!covered())
    throw std::runtime_error("gpc: level q unreachable, coverage table inconsistent");
  return chosen;
}

struct QProbe {
  double q = 0.0;
  std::size_t cover_size = 0;
  bool accepted = false;
  bool refined = false;  ///< probe past the 1/m stopping width
};

struct SaturateResult {
  std::vector<std::size_t> chosen;  ///< insertion order of the kept cover
  double psi = 1.0;                 ///< cover-size inflation bound
  std::size_t size_cap = 0;         ///< floor(psi * k)
  double q_lo = 0.0, q_hi = 1.0;    ///< final bisection interval
  std::vector<QProbe> q_trace;
};

/// floor(psi * k), the relaxed cover-size budget.
inline double saturate_psi(const CoverageObjective& obj) {
  double best = 0.0;
  for (std::size_t c = 0; c < obj.num_points(); ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < obj.num_lambdas(); ++i) total += obj.value[i][c];
    best = std::max(best, total);
  }
  return 1.0 + std::log(best);
}

/**
 * @brief SATURATE: bisection on the guaranteeable coverage level.
 *
 * Keeps the cover of the largest q whose GPC size stays within
 * floor(psi k). The classic loop stops once the interval is narrower than
 * 1/m; with real-valued coverage that precision can leave the kept level
 * up to 1/m short of the max-min optimum, so bisection continues to
 * @p refine_width (probes flagged as refined in the trace).
 */
inline SaturateResult saturate(const CoverageObjective& obj, std::size_t k,
                               double refine_width = 1e-9) {
  if (k == 0) throw std::invalid_argument("saturate: k must be positive");
  const std::size_t n = obj.num_points();
  const std::size_t m = obj.num_lambdas();
  SaturateResult res;
  res.psi = saturate_psi(obj);
  res.size_cap = static_cast<std::size_t>(std::floor(res.psi * static_cast<double>(k)));
  if (res.size_cap == 0) res.size_cap = 1;
  if (k >= n) {
    // budget covers everything
    res.chosen.resize(n);
    for (std::size_t c = 0; c < n; ++c) res.chosen[c] = c;
    res.q_lo = res.q_hi = 1.0;
    return res;
  }
  const double coarse_width = 1.0 / static_cast<double>(m);
  double lo = 0.0, hi = 1.0;  // min_i F_i(D) = 1 by construction
  while (hi - lo >= refine_width) {
    const double q = 0.5 * (lo + hi);
    std::vector<std::size_t> cover = gpc(obj, q);
    QProbe probe{q, cover.size(), false, hi - lo < coarse_width};
    if (cover.size() > res.size_cap) {
      hi = q;
    } else {
      lo = q;
      probe.accepted = true;
      res.chosen = std::move(cover);
    }
    res.q_trace.push_back(probe);
  }
  res.q_lo = lo;
  res.q_hi = hi;
  if (res.chosen.empty())
    throw std::runtime_error("saturate: no acceptable cover found");
  return res;
}

/// Greedy max-min baseline: k rounds of argmax_{c} min_i F_i(C + c).
inline std::vector<std::size_t> greedy_maxmin(const CoverageObjective& obj, std::size_t k) {
  const std::size_t n = obj.num_points();
  const std::size_t m = obj.num_lambdas();
  std::vector<double> cur(m, 0.0);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> chosen;
  for (std::size_t round = 0; round < k && chosen.size() < n; ++round) {
    double best = -1.0;
    std::size_t best_c = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c]) continue;
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
        worst = std::min(worst, std::max(cur[i], obj.value[i][c]));
      if (worst > best) {
        best = worst;
        best_c = c;
      }
    }
    used[best_c] = true;
    chosen.push_back(best_c);
    for (std::size_t i = 0; i < m; ++i)
      cur[i] = std::max(cur[i], obj.value[i][best_c]);
  }
  return chosen;
}

/// Random baseline: k distinct points, seeded.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("random_subset: k exceeds the point count");
  return rng.sample_without_replacement(n, k);
}

}  // namespace mosh

#endif  // MOSH_SPARSE_HPP
