#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace symgraph {

// Counter-based generator: output i of a stream is mix64(key + (i+1)*gamma).
// Any draw can be recomputed from (key, index), so streams are splittable and
// results do not depend on iteration order or thread count.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Key of the child stream `name` (optionally indexed) of `parent`.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::string_view name,
                                   std::uint64_t index = 0) noexcept {
  return mix64(mix64(parent ^ hash_name(name)) + kGoldenGamma * (index + 1));
}

constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Uniform in [0,1) addressed by (key, index).
constexpr double keyed_uniform(std::uint64_t key, std::uint64_t index) noexcept {
  return to_unit(mix64(key + kGoldenGamma * (index + 1)));
}

class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_ + kGoldenGamma * ++counter_); }

  std::uint64_t key() const noexcept { return key_; }

  Stream child(std::string_view name, std::uint64_t index = 0) const noexcept {
    return Stream(derive_key(key_, name, index));
  }

  double uniform() noexcept { return to_unit((*this)()); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-and-reject.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Number of failures before the next success of Bernoulli(p) trials.
  /// Returns max() when p == 0.
  std::uint64_t geometric_skip(double p) noexcept {
    if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
    if (p >= 1.0) return 0;
    const double u = 1.0 - uniform();  // (0,1]
    const double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(k);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace symgraph
