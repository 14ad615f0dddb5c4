/**
 * @file shf.hpp
 * @brief Piecewise-linear soft-hard utility functions.
 *
 * A soft-hard function maps an objective value to a utility that is -inf
 * below the hard bound, rises steeply from the hard bound (utility 0) to
 * the soft bound (utility 1), then climbs with a diminished slope until it
 * saturates at the indifference threshold alpha_tau.
 */
#ifndef MOSH_SHF_HPP
#define MOSH_SHF_HPP

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mosh {

/// Sentinel for hard-bound violation. IEEE -inf already has the required
/// semantics: ordered below every finite value, absorbing under addition.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double v) { return v == kNegInf; }

/** @brief Bounds and slopes of one objective's soft-hard function. */
struct ShfSpec {
  double alpha_soft = 0.0;
  double alpha_hard = 0.0;
  double zeta = 2.0;        ///< indifference multiplier, alpha_tau = a_H + zeta (a_S - a_H)
  double beta_slope = 0.5;  ///< diminished slope above the soft bound

  double alpha_tau() const { return alpha_hard + zeta * (alpha_soft - alpha_hard); }

  void validate() const {
    if (!(alpha_hard < alpha_soft))
      throw std::invalid_argument("ShfSpec: requires alpha_hard < alpha_soft");
    if (!(zeta > 1.0))
      throw std::invalid_argument("ShfSpec: requires zeta > 1 so alpha_tau > alpha_soft");
    if (!(beta_slope >= 0.0))
      throw std::invalid_argument("ShfSpec: requires beta_slope >= 0");
  }
};

/// Normalized coordinate: 0 at the hard bound, 0.5 at the soft bound.
inline double shf_normalize(const ShfSpec& s, double z) {
  return (z - s.alpha_hard) / (s.alpha_soft - s.alpha_hard) * 0.5;
}

/// Utility value at saturation (phi >= alpha_tau), the maximum finite output.
inline double shf_saturation(const ShfSpec& s) {
  return 1.0 + 2.0 * s.beta_slope * (shf_normalize(s, s.alpha_tau()) - 0.5);
}

/**
 * @brief Evaluates one soft-hard function.
 *
 * Branches, in terms of the normalized coordinate t = shf_normalize(phi):
 * below a_H -> -inf; at a_H -> 0; inside (a_H, a_S) -> 2t; at a_S -> 1;
 * inside (a_S, a_tau) -> 1 + 2 beta (t - 1/2); at or above a_tau -> the
 * saturation value.
 */
inline double shf_eval(const ShfSpec& s, double phi) {
  if (phi < s.alpha_hard) return kNegInf;
  if (phi == s.alpha_hard) return 0.0;
  if (phi == s.alpha_soft) return 1.0;
  if (phi < s.alpha_soft) return 2.0 * shf_normalize(s, phi);
  if (phi >= s.alpha_tau()) return shf_saturation(s);
  return 1.0 + 2.0 * s.beta_slope * (shf_normalize(s, phi) - 0.5);
}

/** @brief One ShfSpec per objective. */
struct ShfVectorSpec {
  std::vector<ShfSpec> per_objective;

  std::size_t size() const { return per_objective.size(); }
  const ShfSpec& operator[](std::size_t i) const { return per_objective[i]; }

  void validate() const {
    if (per_objective.empty())
      throw std::invalid_argument("ShfVectorSpec: needs at least one objective");
    for (const ShfSpec& s : per_objective) s.validate();
  }
};

/// Componentwise utility vector; any hard violation yields a -inf coordinate.
inline std::vector<double> shf_eval_vector(const ShfVectorSpec& spec,
                                           const std::vector<double>& phi) {
  if (phi.size() != spec.size())
    throw std::invalid_argument("shf_eval_vector: dimension mismatch, got " +
                                std::to_string(phi.size()) + " values for " +
                                std::to_string(spec.size()) + " objectives");
  std::vector<double> u(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) u[i] = shf_eval(spec[i], phi[i]);
  return u;
}

/// True when every coordinate clears its hard bound.
inline bool hard_feasible(const std::vector<double>& utility) {
  for (double v : utility)
    if (is_neg_inf(v)) return false;
  return true;
}

}  // namespace mosh

#endif  // MOSH_SHF_HPP
