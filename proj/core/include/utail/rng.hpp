// rng.hpp
//
// Deterministic random number streams. Replicate i of experiment id E under
// master seed S gets its own xoshiro256++ generator seeded from
// splitmix64(S ^ avalanche(fnv1a64(E) ^ golden*i)), so results are
// reproducible for a fixed seed regardless of thread count or scheduling.
// xoshiro256++ and splitmix64 are the public-domain generators of Blackman
// and Vigna; they are bit-exact across platforms because they use only
// integer operations.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace utail {

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64 finalizer, also used as an avalanche mixer.
inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t avalanche(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64_next(s);
}

class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_key) {
    std::uint64_t s = master_seed ^ avalanche(stream_key);
    for (auto& w : state_) w = splitmix64_next(s);
  }

  // xoshiro256++
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa offset by half an
  // ulp so inverse-CDF samplers can take log(u) and log(1-u) safely.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

// Stream key for replicate `replicate` of the experiment named `id`.
inline std::uint64_t stream_key(std::string_view id, std::uint64_t replicate) {
  return fnv1a64(id) ^ (0x9e3779b97f4a7c15ull * (replicate + 1));
}

inline RngStream derive_stream(std::uint64_t master_seed, std::string_view id,
                               std::uint64_t replicate) {
  return RngStream(master_seed, stream_key(id, replicate));
}

}  // namespace utail
