#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hclex {

// splitmix64. All randomness in the project flows through this generator:
// std distributions are implementation-defined, so reproducibility across
// toolchains requires owning the draw logic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free multiply-shift (Lemire); bias is < 2^-64 per draw.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// FNV-1a over the label, xor-folded into the seed. Stage and substream
// seeds are derived this way so one --seed drives the whole pipeline.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return seed ^ h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ull + salt));
  return r.next_u64();
}

}  // namespace hclex
