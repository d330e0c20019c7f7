#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <vector>

namespace acnet {

using Rng = std::mt19937_64;

// Independent generator for a (master seed, key...) tuple. Streams depend only
// on the key, never on scheduling, which keeps parallel runs reproducible.
inline Rng substream(std::uint64_t master, std::initializer_list<std::int64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * key.size());
  words.push_back(static_cast<std::uint32_t>(master));
  words.push_back(static_cast<std::uint32_t>(master >> 32));
  for (auto k : key) {
    const auto u = static_cast<std::uint64_t>(k);
    words.push_back(static_cast<std::uint32_t>(u));
    words.push_back(static_cast<std::uint32_t>(u >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Integer threshold T with P(x < T) = p for x uniform on 64 bits. p >= 1 maps
// to the maximum, which bernoulli() treats as certain.
inline std::uint64_t bernoulli_threshold(double p) {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  const double scaled = std::ldexp(p, 64);
  if (scaled >= 18446744073709551615.0) return std::numeric_limits<std::uint64_t>::max() - 1;
  return static_cast<std::uint64_t>(scaled);
}

inline bool bernoulli(Rng& rng, std::uint64_t threshold) {
  return threshold == std::numeric_limits<std::uint64_t>::max() || rng() < threshold;
}

}  // namespace acnet
