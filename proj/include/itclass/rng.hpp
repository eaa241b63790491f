#ifndef ITCLASS_RNG_HPP
#define ITCLASS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace itclass {

// SplitMix64. Deterministic across platforms, unlike the std distributions;
// every seeded behaviour in the toolkit (folds, bootstrap, shuffles, data
// generation) goes through this so that runs are byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n) {
    // Lemire's method without the rejection loop refinement; bias is
    // negligible for the small n used here, but keep the rejection anyway.
    std::uint64_t x, r;
    do {
      x = next_u64();
      r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call (the pair's second half is discarded to
  // keep the stream position independent of call parity).
  double gaussian(double mean, double sd) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mean + sd * z;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derive an independent stream for item `index`; used so that parallel
  // per-item work (bootstrap resamples, folds) matches the sequential run.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0xA0761D6478BD642FULL * (index + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace itclass

#endif
