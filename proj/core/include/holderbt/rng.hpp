#pragma once

#include <array>
#include <cstdint>

namespace holderbt {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters. Exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The 64-bit seed is the Philox key (low word first). The 128-bit counter is
/// (block index low, block index high, stream low, stream high), so every
/// (seed, stream) pair is an independent sequence and `split` derives
/// children without consuming state. Each block yields two 64-bit words,
/// assembled as `w0 | (w1 << 32)` and `w2 | (w3 << 32)`.
///
/// Derived draws, fixed so other implementations can reproduce them:
///   uniform()  = (next_u64() >> 11) * 2^-53, in [0, 1)
///   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), two uniforms per draw
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  /// Child stream keyed by the same seed; stream id mixed with `child`.
  CounterRng split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Stream ids used by the experiment harness.
namespace streams {
inline constexpr std::uint64_t kData = 1;
inline constexpr std::uint64_t kLatents = 2;
inline constexpr std::uint64_t kInit = 3;
inline constexpr std::uint64_t kProbe = 4;
}  // namespace streams

}  // namespace holderbt
