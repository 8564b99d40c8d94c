// rng.hpp - Seeded random number generation for Monte Carlo replication.
//
// Reproducibility contract: a path is a pure function of (base seed, path
// index, stream tag). Per-path seeds are derived with splitmix64 so that
// paths can be generated in any order or in parallel and still replay
// bit-exactly. The underlying generator is std::mt19937_64, which is fully
// specified by the standard.

#pragma once

#include <cstdint>
#include <random>

namespace qperf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Collapse (seed, path index, stream tag) into one 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t path,
                                 std::uint64_t stream) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= path;
  h ^= splitmix64(s);
  s ^= stream;
  h ^= splitmix64(s);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qperf
