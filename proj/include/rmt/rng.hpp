#pragma once

#include <array>
#include <cstdint>

namespace rmt {

// One Philox4x32-10 block: encrypts a 128-bit counter under a 64-bit key.
// Exposed for known-answer tests against the published reference vectors.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based random stream.
//
// The generator is Philox4x32-10 with the mapping
//   key     = (low word of seed, high word of seed)
//   counter = (low word of block index, high word of block index,
//              low word of stream_id, high word of stream_id)
// so a (seed, stream_id) pair names a stream of 2^64 blocks of 128 random
// bits, independent of every other stream_id under the same seed.  Streams
// are stateless to derive (no global RNG) and cheap to construct, which is
// what makes per-trial streams practical: parallel workers can jump to any
// trial's stream without sequencing through predecessors.
//
// A stream is single-owner: it carries buffer/cache state and must not be
// shared between concurrent tasks.  Identical (seed, stream_id) produces an
// identical draw sequence on every run and every worker layout.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Uniform 64-bit word.
  std::uint64_t next_u64();

  // Uniform on [0, 1): 53-bit mantissa, (x >> 11) * 2^-53.
  double next_uniform();

  // Uniform on (0, 1]: never zero, safe under log().
  double next_open_uniform();

  // Standard normal via the trigonometric Box-Muller transform; generates a
  // pair and caches the second value.
  double next_normal();

  // Uniform on {-1, +1}.
  double next_rademacher();

  // Uniform on [-sqrt(3), sqrt(3)]: mean 0, variance 1.
  double next_uniform_unit_variance();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;  // buffer exhausted, refill on first use
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Convenience spelling of the (seed, stream_id) -> stream derivation.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

}  // namespace rmt
