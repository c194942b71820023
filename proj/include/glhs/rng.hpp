#pragma once

// Counter-based random streams. Every replica derives its streams from
// (master seed, replica index, substream tag) by hashing, with no shared
// state, so the draws seen by a replica do not depend on scheduling or worker
// count. Within a stream, bits come from xoshiro256++ seeded by SplitMix64.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace glhs {

enum class Substream : std::uint32_t {
  Init = 1,
  Environment = 2,
  Walker = 3,
  Sampler = 4,
};

// SplitMix64 finalizer (Steele, Lea, Flood).
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  explicit RngStream(std::uint64_t stream_id) noexcept {
    std::uint64_t x = stream_id;
    for (auto& word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      word = splitmix64(x);
    }
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t out = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return out;
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint32_t uniform_int(std::uint32_t bound) noexcept {
    // Lemire's multiply-shift; the bias is below 2^-32 for the small bounds used here.
    return static_cast<std::uint32_t>((std::uint64_t{static_cast<std::uint32_t>(next_u64())} * bound) >> 32);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Ziggurat sampler from Boost.Random driven by this stream's bits; the
  // distribution object is stateless between calls.
  double normal() noexcept { return boost::random::normal_distribution<double>()(*this); }

  // Knuth's product method; callers keep the mean small.
  std::uint32_t poisson(double mean) noexcept {
    const double limit = std::exp(-mean);
    std::uint32_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

// Maps (replica, substream) to an independent stream. Pure function of its inputs.
class RngPlan {
 public:
  explicit RngPlan(std::uint64_t master_seed) noexcept : master_seed_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }

  std::uint64_t stream_id(std::uint64_t replica, Substream tag, std::uint64_t extra = 0) const noexcept {
    std::uint64_t h = splitmix64(master_seed_);
    h = splitmix64(h ^ replica);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return splitmix64(h ^ extra);
  }

  RngStream stream(std::uint64_t replica, Substream tag, std::uint64_t extra = 0) const noexcept {
    return RngStream(stream_id(replica, tag, extra));
  }

 private:
  std::uint64_t master_seed_;
};

}  // namespace glhs
