#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gridflow {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; used to fold string ids into generator keys.
inline constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stateless counter-based generator: the value at a counter depends only on
/// the key chain and the counter, never on call order.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key = 0) : key_(splitmix64(key)) {}

  constexpr CounterRng derive(std::uint64_t salt) const { return CounterRng(key_ ^ splitmix64(salt + 0x5851f42d4c957f2dULL)); }

  constexpr std::uint64_t at(std::uint64_t counter) const { return splitmix64(key_ ^ splitmix64(counter)); }

  /// -1 or +1.
  constexpr int sign(std::uint64_t counter) const { return (at(counter) & 1U) ? 1 : -1; }

 private:
  std::uint64_t key_;
};

using Engine = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; stable across standard libraries.
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) {
  const std::uint64_t limit = Engine::max() - Engine::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform real in [0, 1).
inline double uniform_real(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, Engine& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace gridflow
