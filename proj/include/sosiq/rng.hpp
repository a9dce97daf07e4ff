#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sosiq {

// splitmix64 finalizer; used to derive independent substream seeds from a
// single master seed so results do not depend on processing order.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  return mix_seed(a ^ mix_seed(b));
}

inline uint64_t hash_string(const std::string& s) {
  // FNV-1a
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Fisher-Yates with an explicit draw rule (j = next() % (i+1)) so that the
// shuffle is pinned by this definition, not by std::shuffle internals.
template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace sosiq
