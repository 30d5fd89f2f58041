// Copyright 2026 The brwlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace brwlab {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one independent random stream: (experiment seed, replica
/// index, stream index). The stream index is the generation number for
/// branching runs and a fixed tag for other sub-streams.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint32_t stream = 0;

  StreamKey with_replica(std::uint64_t r) const { return {seed, r, stream}; }
  StreamKey with_stream(std::uint32_t s) const { return {seed, replica, s}; }
};

/// Counter-based generator satisfying UniformRandomBitGenerator. Two
/// streams with distinct keys never share blocks, so any replica can be
/// regenerated in isolation regardless of how work was scheduled.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(StreamKey key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (cursor_ == 2) refill();
    return buffer_[cursor_++];
  }

  /// Uniform double in the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  const StreamKey& key() const { return key_; }

 private:
  void refill();

  StreamKey key_;
  std::array<std::uint32_t, 2> philox_key_{};
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int cursor_ = 2;
};

}  // namespace brwlab
