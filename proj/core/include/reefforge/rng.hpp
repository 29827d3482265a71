#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace reefforge {

// Deterministic, cross-platform PRNG: xoshiro256++ seeded through splitmix64.
// The algorithm name/version below is recorded in every manifest so datasets
// can be regenerated bit-for-bit on any machine. Floating-point draws use
// 53-bit mantissa scaling, never std::uniform_real_distribution (whose output
// is implementation-defined).
class Rng {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256++";
  static constexpr int kVersion = 1;

  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // [0, 1)
  double uniform_double();

  // uniform in [a, b); returns exactly a when a == b
  double uniform_real(double a, double b);

  // [0, n); n must be > 0
  uint64_t uniform_index(uint64_t n);

  // inclusive [lo, hi]
  int64_t uniform_int(int64_t lo, int64_t hi);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), order seed-determined (partial Fisher-Yates)
  std::vector<size_t> sample_distinct(size_t n, size_t k);

  // Stable derivation of per-stream seeds from a master seed ("seed derivation v1").
  static uint64_t derive(uint64_t master, uint64_t stream);

 private:
  uint64_t s_[4];
};

struct RngId {
  std::string name = Rng::kAlgorithm;
  int version = Rng::kVersion;
};

}  // namespace reefforge
