#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <initializer_list>
#include <random>
#include <vector>

namespace erlasso {

// Deterministic RNG wrapper. All draws go through explicit arithmetic on the
// standard-mandated mt19937_64 stream, so sequences are identical across
// platforms and standard library implementations. Distinct logical streams
// (per trial, per cell, ...) are derived by hashing a path of ids into the
// master seed, never by sharing a generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive_seed(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix(master);
    for (std::uint64_t id : path) s = mix(s ^ mix(id));
    return s;
  }

  static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
  }

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  // uniform in [-1, 1]
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // standard normal via Box-Muller (explicit, not std::normal_distribution,
  // whose algorithm is implementation-defined)
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n), rejection sampled (n > 0)
  std::int64_t uniform_int(std::int64_t n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = ~0ull - (~0ull % un);
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return static_cast<std::int64_t>(x % un);
  }

  // sorted uniform k-subset of {0, ..., n-1} via Floyd's algorithm
  std::vector<std::int32_t> subset(std::int32_t n, std::int32_t k);

  // random permutation of {0, ..., n-1} (Fisher-Yates)
  std::vector<std::int32_t> permutation(std::int32_t n);

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline std::vector<std::int32_t> Rng::subset(std::int32_t n, std::int32_t k) {
  std::vector<std::int32_t> out;
  out.reserve(static_cast<std::size_t>(k));
  // Floyd: for j = n-k..n-1 pick t in [0, j]; insert t unless taken, else j.
  for (std::int32_t j = n - k; j < n; ++j) {
    const std::int32_t t = static_cast<std::int32_t>(uniform_int(j + 1));
    bool taken = false;
    for (std::int32_t v : out) {
      if (v == t) { taken = true; break; }
    }
    out.push_back(taken ? j : t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::int32_t> Rng::permutation(std::int32_t n) {
  std::vector<std::int32_t> p(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (std::int32_t i = n - 1; i > 0; --i) {
    const std::int32_t j = static_cast<std::int32_t>(uniform_int(i + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace erlasso
