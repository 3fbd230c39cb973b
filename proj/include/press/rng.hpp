#pragma once

#include <cstdint>

namespace press {

// splitmix64: tiny deterministic generator. Self-contained so that generated
// corpora are bit-identical across standard library versions (the
// distributions in <random> are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent stream for sub-task i (per-trajectory seeds).
  Rng fork(std::uint64_t i) {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    r.next();
    return r;
  }

  // Uniform in [lo, hi] inclusive. Modulo bias is irrelevant at the range
  // sizes used here (< 2^32).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double real01() { return (next() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * real01(); }

 private:
  std::uint64_t state_;
};

}  // namespace press
