/**
 * @file scalarize.hpp
 * @brief Scalarization of utility vectors and the weight-vector prior.
 */
#ifndef MOSH_SCALARIZE_HPP
#define MOSH_SCALARIZE_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosh/rng.hpp"
#include "mosh/shf.hpp"

namespace mosh {

/// Nonnegative weights summing to 1 (see validate_weights).
using WeightVector = std::vector<double>;

inline void validate_weights(const WeightVector& w, double tol = 1e-12) {
  if (w.empty()) throw std::invalid_argument("WeightVector: empty");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw std::invalid_argument("WeightVector: negative weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument("WeightVector: weights sum to " + std::to_string(sum));
}

inline WeightVector uniform_weights(std::size_t n) {
  return WeightVector(n, 1.0 / static_cast<double>(n));
}

enum class Scalarization { chebyshev, linear };

inline Scalarization scalarization_from_string(const std::string& s) {
  if (s == "chebyshev") return Scalarization::chebyshev;
  if (s == "linear") return Scalarization::linear;
  throw std::invalid_argument("unknown scalarization: " + s);
}

inline const char* to_string(Scalarization s) {
  return s == Scalarization::chebyshev ? "chebyshev" : "linear";
}

/** @brief Scalarization choice plus the augmented-Chebyshev parameters. */
struct ScalarizeParams {
  Scalarization kind = Scalarization::chebyshev;
  std::vector<double> utopia;  ///< z*, per-objective; must dominate attainable utilities
  double gamma = 0.05;         ///< augmentation coefficient

  void validate(std::size_t num_objectives) const {
    if (kind == Scalarization::chebyshev) {
      if (utopia.size() != num_objectives)
        throw std::invalid_argument("ScalarizeParams: utopia size mismatch");
      if (!(gamma >= 0.0)) throw std::invalid_argument("ScalarizeParams: gamma < 0");
    }
  }
};

/// Default utopia point: per-objective saturation value plus a small offset,
/// so z* strictly dominates every attainable utility.
inline std::vector<double> default_utopia(const ShfVectorSpec& spec, double offset = 0.01) {
  std::vector<double> z(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) z[i] = shf_saturation(spec[i]) + offset;
  return z;
}

inline ScalarizeParams default_scalarize_params(const ShfVectorSpec& spec,
                                                Scalarization kind = Scalarization::chebyshev,
                                                double gamma = 0.05) {
  return ScalarizeParams{kind, default_utopia(spec), gamma};
}

/**
 * @brief Augmented Chebyshev scalarization.
 *
 * s_lambda(u) = -max_l [lambda_l |u_l - z*_l|] - gamma sum_l |u_l - z*_l|.
 * Monotone increasing in every u_l for u <= z*; any -inf coordinate
 * propagates to -inf.
 */
inline double chebyshev_scalarize(const std::vector<double>& u, const WeightVector& lambda,
                                  const ScalarizeParams& p) {
  double worst = 0.0, total = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l) {
    if (is_neg_inf(u[l])) return kNegInf;
    const double d = std::abs(u[l] - p.utopia[l]);
    const double weighted = lambda[l] * d;
    if (weighted > worst) worst = weighted;
    total += d;
  }
  return -worst - p.gamma * total;
}

/// Linear scalarization lambda . u; any -inf coordinate propagates.
inline double linear_scalarize(const std::vector<double>& u, const WeightVector& lambda) {
  double s = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l) {
    if (is_neg_inf(u[l])) return kNegInf;
    s += lambda[l] * u[l];
  }
  return s;
}

inline double scalarize(const std::vector<double>& u, const WeightVector& lambda,
                        const ScalarizeParams& p) {
  return p.kind == Scalarization::chebyshev ? chebyshev_scalarize(u, lambda, p)
                                            : linear_scalarize(u, lambda);
}

/**
 * @brief Draws one weight vector from the soft-hard prior heuristic.
 *
 * Per objective: u_l ~ N(alpha_S, |alpha_H - alpha_S| / 3), clamped below at
 * @p floor, then L1-normalized. The spread puts most of the mass across the
 * soft-hard band of each objective.
 */
inline WeightVector sample_lambda(const ShfVectorSpec& spec, Rng& rng, double floor = 1e-6) {
  WeightVector w(spec.size());
  double sum = 0.0;
  for (std::size_t l = 0; l < spec.size(); ++l) {
    const ShfSpec& s = spec[l];
    const double width = std::abs(s.alpha_hard - s.alpha_soft);
    double draw = rng.normal(s.alpha_soft, width / 3.0);
    if (draw < floor) draw = floor;
    w[l] = draw;
    sum += draw;
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace mosh

#endif  // MOSH_SCALARIZE_HPP
