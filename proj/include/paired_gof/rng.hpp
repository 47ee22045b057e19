#ifndef PAIRED_GOF_RNG_HPP
#define PAIRED_GOF_RNG_HPP

#include <cstdint>
#include <cstdlib>
#include <random>
#include <thread>

namespace paired_gof {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic stream derivation: the same (seed, stream) pair always
/// produces the same generator, independent of thread scheduling.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return detail::splitmix64(detail::splitmix64(seed) ^ stream * 0xD1342543DE82EF95ULL);
}

/// Seedable deterministic random source for one stream.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream)
      : engine_(derive_stream(seed, stream)) {}

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Binomial draw by CDF inversion; exact and platform-independent.
  std::int64_t binomial(std::int64_t n, double p) {
    if (n <= 0) return 0;
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double u = uniform();
    // Walk the pmf from k = 0 upward.
    const double q = 1.0 - p;
    double pmf = std::exp(double(n) * std::log(q));
    double cdf = pmf;
    std::int64_t k = 0;
    const double ratio = p / q;
    while (cdf < u && k < n) {
      pmf *= double(n - k) / double(k + 1) * ratio;
      cdf += pmf;
      ++k;
      if (pmf == 0.0 && cdf < u) return n;  // numeric tail guard
    }
    return k;
  }

  /// Multinomial draw via sequential conditional binomials.
  void multinomial3(std::int64_t n, double p0, double p1, std::int64_t& k0,
                    std::int64_t& k1, std::int64_t& k2) {
    k0 = binomial(n, p0);
    const double rest = 1.0 - p0;
    k1 = rest > 0.0 ? binomial(n - k0, std::min(1.0, p1 / rest)) : 0;
    k2 = n - k0 - k1;
  }

 private:
  std::mt19937_64 engine_;
};

/// Worker-thread budget: PAIRED_GOF_THREADS when set, hardware concurrency
/// otherwise.
inline unsigned worker_threads() {
  if (const char* env = std::getenv("PAIRED_GOF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_RNG_HPP
