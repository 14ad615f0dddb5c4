/**
 * @file pareto.hpp
 * @brief Dominance tests, nondominated filtering, and hypervolume.
 *
 * Maximization convention throughout: a dominates b when a >= b
 * componentwise with at least one strict coordinate.
 */
#ifndef MOSH_PARETO_HPP
#define MOSH_PARETO_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mosh/rng.hpp"

namespace mosh {

inline bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

/**
 * @brief Indices of the nondominated points, in input order.
 *
 * Sweep over a lexicographically descending order: a dominator always
 * precedes its victims there, so each point only needs comparing against
 * the survivors seen so far.
 */
inline std::vector<std::size_t> nondominated_indices(
    const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a] != points[b]) return points[a] > points[b];
    return a < b;
  });
  std::vector<bool> keep(n, false);
  std::vector<std::size_t> survivors;
  for (std::size_t idx : order) {
    bool dominated = false;
    for (std::size_t s : survivors) {
      if (dominates(points[s], points[idx])) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      keep[idx] = true;
      survivors.push_back(idx);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

inline std::vector<std::vector<double>> nondominated_filter(
    const std::vector<std::vector<double>>& points) {
  std::vector<std::vector<double>> out;
  for (std::size_t i : nondominated_indices(points)) out.push_back(points[i]);
  return out;
}

/**
 * @brief Exact 2-D hypervolume by a descending sweep over the first
 * coordinate (ties broken by descending second coordinate).
 *
 * Only points strictly dominating @p ref contribute.
 */
inline double hypervolume_exact_2d(std::vector<std::vector<double>> points,
                                   const std::vector<double>& ref) {
  if (ref.size() != 2) throw std::invalid_argument("hypervolume_exact_2d: L != 2");
  std::erase_if(points, [&](const std::vector<double>& p) {
    return !(p[0] > ref[0] && p[1] > ref[1]);
  });
  if (points.empty()) return 0.0;
  std::sort(points.begin(), points.end(),
            [](const std::vector<double>& a, const std::vector<double>& b) {
              if (a[0] != b[0]) return a[0] > b[0];
              return a[1] > b[1];
            });
  double hv = 0.0;
  double covered = ref[1];
  for (const std::vector<double>& p : points) {
    if (p[1] > covered) {
      hv += (p[0] - ref[0]) * (p[1] - covered);
      covered = p[1];
    }
  }
  return hv;
}

struct HypervolumeOptions {
  std::uint64_t mc_samples = std::uint64_t{1} << 17;
  std::uint64_t seed = 0;
};

/// Seeded Monte-Carlo estimate for any dimension: samples the box between
/// @p ref and the componentwise maximum of the contributing points.
inline double hypervolume_monte_carlo(const std::vector<std::vector<double>>& points,
                                      const std::vector<double>& ref,
                                      const HypervolumeOptions& opts = {}) {
  const std::size_t dim = ref.size();
  std::vector<const std::vector<double>*> contrib;
  for (const std::vector<double>& p : points) {
    bool dom = true;
    for (std::size_t i = 0; i < dim; ++i)
      if (!(p[i] > ref[i])) {
        dom = false;
        break;
      }
    if (dom) contrib.push_back(&p);
  }
  if (contrib.empty()) return 0.0;
  std::vector<double> upper(ref);
  for (const auto* p : contrib)
    for (std::size_t i = 0; i < dim; ++i) upper[i] = std::max(upper[i], (*p)[i]);
  double volume = 1.0;
  for (std::size_t i = 0; i < dim; ++i) volume *= upper[i] - ref[i];
  if (volume <= 0.0) return 0.0;

  Rng rng(derive_seed(opts.seed, "hv-mc"));
  std::uint64_t hits = 0;
  std::vector<double> s(dim);
  for (std::uint64_t it = 0; it < opts.mc_samples; ++it) {
    for (std::size_t i = 0; i < dim; ++i) s[i] = rng.uniform(ref[i], upper[i]);
    for (const auto* p : contrib) {
      bool inside = true;
      for (std::size_t i = 0; i < dim; ++i)
        if ((*p)[i] < s[i]) {
          inside = false;
          break;
        }
      if (inside) {
        ++hits;
        break;
      }
    }
  }
  return volume * static_cast<double>(hits) / static_cast<double>(opts.mc_samples);
}

/// Exact sweep for L = 2, seeded Monte-Carlo otherwise.
inline double hypervolume(const std::vector<std::vector<double>>& points,
                          const std::vector<double>& ref,
                          const HypervolumeOptions& opts = {}) {
  for (const std::vector<double>& p : points)
    if (p.size() != ref.size())
      throw std::invalid_argument("hypervolume: point/reference dimension mismatch");
  if (ref.size() == 2) return hypervolume_exact_2d(points, ref);
  return hypervolume_monte_carlo(points, ref, opts);
}

}  // namespace mosh

#endif  // MOSH_PARETO_HPP
