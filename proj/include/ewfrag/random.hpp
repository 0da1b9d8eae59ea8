#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ewfrag {

// Identifies one reproducible random stream: a master seed plus an index
// (typically a replicate number).
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

// Derives an unrelated master seed for a named sub-experiment, so that two
// sample groups in one suite never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Generator bound to a SeededStream. Only standard-defined algorithms are
// used (seed_seq, mt19937_64) and every conversion is done here, so the
// draws are bit-identical across platforms and worker counts.
class Rng {
 public:
  explicit Rng(SeededStream stream);

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  // Uniform integer in [0, bound), bound >= 1 (Lemire rejection).
  std::uint64_t below(std::uint64_t bound);
  // Uniformly random permutation of 1..n (Fisher-Yates).
  std::vector<int> permutation(int n);
  // k distinct labels drawn uniformly from 1..n, in draw order.
  std::vector<int> subset(int n, int k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ewfrag
