#pragma once

// Counter-based randomness. Every random quantity in the library is a pure
// function of (key, stream, counter), realized with the SplitMix64 finalizer
// chained over the counter words. Field values at a lattice site are therefore
// translation consistent, and per-replica streams never depend on how many
// replicas are run.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace ergolab {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t key, std::uint64_t stream) noexcept {
  return mix64(mix64(key + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL + kGolden));
}

// Hash of a key prefix (from stream_key) and one more counter word.
constexpr std::uint64_t hash_step(std::uint64_t prefix, std::int64_t word) noexcept {
  return mix64(prefix + static_cast<std::uint64_t>(word) * 0xff51afd7ed558ccdULL + kGolden);
}

inline std::uint64_t counter_hash(std::uint64_t key, std::uint64_t stream,
                                  std::span<const std::int64_t> counter) noexcept {
  std::uint64_t h = stream_key(key, stream);
  for (auto w : counter) h = hash_step(h, w);
  return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Open interval (0, 1); safe for logarithms.
constexpr double to_open_unit(std::uint64_t h) noexcept {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Seed of replica k derived from a master seed; stable under changes of the
// replica count.
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t k) noexcept {
  return mix64(stream_key(master, 0x5eedULL) ^ mix64(k + 1));
}

// UniformRandomBitGenerator over a counter stream.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t key, std::uint64_t stream = 0) noexcept
      : prefix_(stream_key(key, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept {
    return hash_step(prefix_, static_cast<std::int64_t>(counter_++));
  }

  double uniform() noexcept { return to_unit((*this)()); }
  double open_uniform() noexcept { return to_open_unit((*this)()); }
  double exponential(double rate) noexcept { return -std::log(open_uniform()) / rate; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t prefix_;
  std::uint64_t counter_ = 0;
};

}  // namespace ergolab
