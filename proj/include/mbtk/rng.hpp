#pragma once

#include <cstdint>

namespace mbtk {

// splitmix64, used both as a stream-derivation hash and to seed the
// generator below.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// xoshiro256** with hand-rolled bounded draws. std::uniform_int_distribution
// is implementation-defined, which would break bit-for-bit report
// reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) {
      x = splitmix64(x);
      word = x;
    }
    // Avoid the all-zero state (splitmix64 makes this astronomically
    // unlikely, but it is cheap to rule out).
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  // Derive an independent stream from a base seed and a list of tags.
  static Rng stream(uint64_t seed, std::initializer_list<uint64_t> tags) {
    uint64_t x = splitmix64(seed);
    for (uint64_t t : tags) x = splitmix64(x ^ (t + 0x9e3779b97f4a7c15ULL));
    return Rng(x);
  }

  uint64_t next() {
    uint64_t* s = state_;
    const uint64_t result = rotl(s[1] * 5, 7) * 9;
    const uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Unbiased draw from [0, n) by rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  bool coin() { return next() >> 63; }

  double unit() { return (next() >> 11) * 0x1.0p-53; }

 private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  uint64_t state_[4];
};

}  // namespace mbtk
