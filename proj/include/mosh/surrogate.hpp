/**
 * @file surrogate.hpp
 * @brief Per-objective Gaussian-process surrogate with an isotropic
 *        squared-exponential kernel.
 *
 * Targets are z-scored before fitting and the transformation is inverted
 * on output, which keeps the marginal variance of the fitted process near
 * one and makes the fixed noise floor meaningful across problems.
 * Hyperparameters come from a small log-marginal-likelihood grid; the
 * Cholesky factorization retries with an escalating diagonal jitter.
 */
#ifndef MOSH_SURROGATE_HPP
#define MOSH_SURROGATE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mosh {

struct GpConfig {
  double noise_variance = 1e-4;  ///< fixed observation noise in normalized target units
  std::size_t refit_every = 5;   ///< grid refit cadence (plus warm refits at n = 3 and 5)
  double ls_grid_min = 0.05;     ///< lengthscale grid, multiples of the box diagonal
  double ls_grid_max = 2.0;
  std::size_t ls_grid_count = 16;
  std::vector<double> sv_grid = {0.25, 1.0, 4.0};  ///< multiples of the target variance
  std::vector<double> jitter_ladder = {1e-10, 1e-8, 1e-6};
};

struct PosteriorMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

/** @brief One GP over a fixed input box; observations arrive one at a time. */
class GpModel {
 public:
  GpModel(std::vector<double> lo, std::vector<double> hi, GpConfig cfg = {})
      : lo_(std::move(lo)), hi_(std::move(hi)), cfg_(std::move(cfg)) {
    if (lo_.empty() || lo_.size() != hi_.size())
      throw std::invalid_argument("GpModel: bad input box");
    double sq = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (!(hi_[i] > lo_[i])) throw std::invalid_argument("GpModel: empty box side");
      sq += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
    }
    diagonal_ = std::sqrt(sq);
    lengthscale_ = 0.5 * diagonal_;
    signal_variance_ = 1.0;
  }

  std::size_t size() const { return xs_.size(); }
  std::size_t dim() const { return lo_.size(); }
  double lengthscale() const { return lengthscale_; }
  double signal_variance() const { return signal_variance_; }
  std::size_t refit_count() const { return refit_count_; }
  std::size_t last_refit_evaluations() const { return last_refit_evaluations_; }

  /// Appends an observation, refits on schedule, refactorizes.
  void add(const std::vector<double>& x, double y) {
    if (x.size() != dim()) throw std::invalid_argument("GpModel::add: dimension mismatch");
    xs_.push_back(x);
    ys_.push_back(y);
    update_normalization_();
    const std::size_t n = xs_.size();
    if (n >= 3 && (n == 3 || n == 5 || n % cfg_.refit_every == 0)) refit();
    else rebuild_();
  }

  /// Grid search over (lengthscale, signal variance) by log marginal
  /// likelihood; ties resolve toward the smaller lengthscale.
  void refit() {
    if (xs_.size() < 3) throw std::logic_error("GpModel::refit: needs >= 3 observations");
    const double tvar = normalized_target_variance_();
    double best = -std::numeric_limits<double>::infinity();
    double best_ls = lengthscale_, best_sv = signal_variance_;
    std::size_t evals = 0;
    for (std::size_t i = 0; i < cfg_.ls_grid_count; ++i) {
      const double frac =
          cfg_.ls_grid_count == 1
              ? 0.0
              : static_cast<double>(i) / static_cast<double>(cfg_.ls_grid_count - 1);
      const double ls = diagonal_ * cfg_.ls_grid_min *
                        std::pow(cfg_.ls_grid_max / cfg_.ls_grid_min, frac);
      for (double mult : cfg_.sv_grid) {
        const double sv = mult * tvar;
        ++evals;
        const double lml = log_marginal_(ls, sv);
        if (lml > best) {
          best = lml;
          best_ls = ls;
          best_sv = sv;
        }
      }
    }
    last_refit_evaluations_ = evals;
    ++refit_count_;
    lengthscale_ = best_ls;
    signal_variance_ = best_sv;
    rebuild_();
  }

  void set_hyperparameters(double ls, double sv) {
    if (!(ls > 0.0) || !(sv > 0.0))
      throw std::invalid_argument("GpModel: hyperparameters must be positive");
    lengthscale_ = ls;
    signal_variance_ = sv;
    rebuild_();
  }

  PosteriorMoments posterior(const std::vector<double>& x) const {
    if (x.size() != dim())
      throw std::invalid_argument("GpModel::posterior: dimension mismatch");
    const std::size_t n = xs_.size();
    if (n == 0) return {shift_, std::sqrt(signal_variance_) * scale_};
    Eigen::VectorXd ks(n);
    for (std::size_t i = 0; i < n; ++i) ks[static_cast<Eigen::Index>(i)] = kernel_(x, xs_[i]);
    const double mean_n = ks.dot(alpha_);
    const Eigen::VectorXd v = chol_.matrixL().solve(ks);
    double var_n = signal_variance_ - v.squaredNorm();
    if (var_n < 0.0) var_n = 0.0;
    return {mean_n * scale_ + shift_, std::sqrt(var_n) * scale_};
  }

  /// Relative Frobenius error of L L^T against the factorized matrix.
  double factorization_residual() const {
    const std::size_t n = xs_.size();
    if (n == 0) return 0.0;
    const Eigen::MatrixXd K = gram_(lengthscale_, signal_variance_, effective_nugget_);
    const Eigen::MatrixXd L = chol_.matrixL();
    return (L * L.transpose() - K).norm() / K.norm();
  }

 private:
  double kernel_(const std::vector<double>& a, const std::vector<double>& b) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    return signal_variance_ * std::exp(-sq / (2.0 * lengthscale_ * lengthscale_));
  }

  Eigen::MatrixXd gram_(double ls, double sv, double nugget) const {
    const std::size_t n = xs_.size();
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dim(); ++d)
          sq += (xs_[i][d] - xs_[j][d]) * (xs_[i][d] - xs_[j][d]);
        const double v = sv * std::exp(-sq / (2.0 * ls * ls));
        K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += nugget;
    }
    return K;
  }

  void update_normalization_() {
    const std::size_t n = ys_.size();
    double mean = 0.0;
    for (double y : ys_) mean += y;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double y : ys_) var += (y - mean) * (y - mean);
    var /= static_cast<double>(n);
    shift_ = mean;
    scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    yn_.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      yn_[static_cast<Eigen::Index>(i)] = (ys_[i] - shift_) / scale_;
  }

  double normalized_target_variance_() const {
    const std::size_t n = ys_.size();
    const double mean = yn_.mean();
    double var = 0.0;
    for (Eigen::Index i = 0; i < yn_.size(); ++i) var += (yn_[i] - mean) * (yn_[i] - mean);
    var /= static_cast<double>(n);
    return var > 1e-12 ? var : 1.0;
  }

  /// Factorizes K(ls, sv) + noise I, climbing the jitter ladder on failure.
  bool factorize_(double ls, double sv, Eigen::LLT<Eigen::MatrixXd>& out,
                  double& nugget_used) const {
    for (int attempt = -1; attempt < static_cast<int>(cfg_.jitter_ladder.size()); ++attempt) {
      const double jitter = attempt < 0 ? 0.0 : cfg_.jitter_ladder[static_cast<std::size_t>(attempt)];
      const double nugget = cfg_.noise_variance + jitter;
      out.compute(gram_(ls, sv, nugget));
      if (out.info() == Eigen::Success) {
        nugget_used = nugget;
        return true;
      }
    }
    return false;
  }

  double log_marginal_(double ls, double sv) const {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double nugget = 0.0;
    if (!factorize_(ls, sv, llt, nugget)) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd a = llt.solve(yn_);
    const Eigen::MatrixXd L = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += std::log(L(i, i));
    const double n = static_cast<double>(yn_.size());
    return -0.5 * yn_.dot(a) - logdet - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

  void rebuild_() {
    if (xs_.empty()) return;
    if (!factorize_(lengthscale_, signal_variance_, chol_, effective_nugget_))
      throw std::runtime_error("GpModel: covariance not positive definite after max jitter");
    alpha_ = chol_.solve(yn_);
  }

  std::vector<double> lo_, hi_;
  GpConfig cfg_;
  double diagonal_ = 0.0;
  double lengthscale_ = 1.0;
  double signal_variance_ = 1.0;
  std::vector<std::vector<double>> xs_;
  std::vector<double> ys_;
  Eigen::VectorXd yn_;
  double shift_ = 0.0, scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  double effective_nugget_ = 0.0;
  std::size_t refit_count_ = 0;
  std::size_t last_refit_evaluations_ = 0;
};

}  // namespace mosh

#endif  // MOSH_SURROGATE_HPP
