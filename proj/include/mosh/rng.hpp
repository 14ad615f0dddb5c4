/**
 * @file rng.hpp
 * @brief Seed derivation, reproducible draws, and scrambled Halton points.
 *
 * All randomness in the library flows through this header. Distribution
 * draws are implemented on top of std::mt19937_64 instead of the standard
 * <random> distributions so that a (config, seed) pair replays to identical
 * bytes regardless of the standard library in use.
 */
#ifndef MOSH_RNG_HPP
#define MOSH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mosh {

/// One step of the SplitMix64 generator; advances @p state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * @brief Derives an independent sub-stream seed from a root seed.
 *
 * Streams are keyed by a purpose tag plus an index (iteration number,
 * dimension, ...). Distinct tags give disjoint streams, which keeps e.g.
 * observation noise independent of acquisition candidates and makes
 * archive resume replay the exact draws of an uninterrupted run.
 */
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag bytes
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = root ^ h;
  (void)splitmix64(s);
  s ^= index * 0x9e3779b97f4a7c15ULL;
  (void)splitmix64(s);
  return splitmix64(s);
}

/** @brief Deterministic draw source for one purpose stream. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Box-Muller transform (pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n); rejection sampled, no modulo bias.
  std::uint64_t integer(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::integer: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(p[i - 1], p[integer(i)]);
    }
    return p;
  }

  /// k distinct indices from {0, ..., n-1}, in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> p = permutation(n);
    p.resize(k);
    return p;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {
inline constexpr int kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                        23, 29, 31, 37, 41, 43, 47, 53};
}

/**
 * @brief Digit-scrambled Halton sequence with a seeded rotation.
 *
 * Per dimension: a seeded digit permutation (fixing 0) plus a
 * Cranley-Patterson shift. Adequate space filling at the d <= 8 scale the
 * benchmarks need; the point at index 0 is skipped.
 */
class HaltonSampler {
 public:
  HaltonSampler(std::size_t dim, std::uint64_t seed) : dim_(dim) {
    if (dim == 0 || dim > std::size(detail::kHaltonPrimes))
      throw std::invalid_argument("HaltonSampler: unsupported dimension");
    perms_.resize(dim);
    shifts_.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const int base = detail::kHaltonPrimes[d];
      Rng rng(derive_seed(seed, "halton", d));
      // permutation of {1, ..., base-1}; digit 0 stays fixed so the finite
      // digit expansion of the index stays exact
      std::vector<int> perm(static_cast<std::size_t>(base));
      for (int v = 0; v < base; ++v) perm[static_cast<std::size_t>(v)] = v;
      for (int i = base - 1; i > 1; --i) {
        const int j = 1 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      }
      perms_[d] = std::move(perm);
      shifts_[d] = rng.uniform();
    }
  }

  /// Next point in [0, 1)^dim.
  std::vector<double> next() {
    ++index_;
    std::vector<double> p(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
      const int base = detail::kHaltonPrimes[d];
      const double inv = 1.0 / base;
      double f = inv, v = 0.0;
      for (std::uint64_t n = index_; n != 0; n /= static_cast<std::uint64_t>(base)) {
        v += perms_[d][static_cast<std::size_t>(n % static_cast<std::uint64_t>(base))] * f;
        f *= inv;
      }
      v += shifts_[d];
      p[d] = v - std::floor(v);
    }
    return p;
  }

  std::vector<std::vector<double>> take(std::size_t n) {
    std::vector<std::vector<double>> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(next());
    return pts;
  }

 private:
  std::size_t dim_;
  std::uint64_t index_ = 0;
  std::vector<std::vector<int>> perms_;
  std::vector<double> shifts_;
};

/// Maps a [0,1)^d point into the box [lo, hi].
inline std::vector<double> scale_to_box(const std::vector<double>& unit,
                                        const std::vector<double>& lo,
                                        const std::vector<double>& hi) {
  std::vector<double> x(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit[i];
  return x;
}

}  // namespace mosh

#endif  // MOSH_RNG_HPP
