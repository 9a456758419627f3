#pragma once

#include <cstdint>

namespace gelkit {

// Counter-based generator: the state is (key, counter) and each output mixes
// key + counter * weyl through an avalanche finalizer. Streams derived from
// (seed, stream) are independent for practical purposes, which keeps parallel
// runs reproducible regardless of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key_ = mix(seed + 0x9E3779B97F4A7C15ull) ^
           mix(stream * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull);
  }

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return mix(key_ + counter_);
  }

  // uniform in [0, bound) without modulo bias (Lemire rejection)
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double next_unit() {  // [0, 1) with 53 random bits
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace gelkit
