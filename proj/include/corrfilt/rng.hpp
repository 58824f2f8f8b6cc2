// Copyright 2026 the corrfilt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRFILT_RNG_HPP
#define CORRFILT_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

/**
 * \file
 * \brief Counter-based random number generation (Philox 4x32-10).
 *
 * Every draw is a pure function of (master_seed, stream_id, counter), so
 * ensembles are reproducible bit-for-bit no matter how streams are
 * scheduled across workers. One stream per simulated path; the consumer
 * advances the counter in a documented, fixed order.
 */

namespace corrfilt {

/// Identifies one reproducible draw stream.
///
/// (master_seed, stream_id) uniquely determines every increment the stream
/// will ever produce. Sub-streams (e.g. the two halves of a product-coupled
/// pair) are carved out of the stream_id space, see derive_substream().
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// Spacing between stream bases when one operation consumes several
/// independent ensembles. Single ensembles must keep M below this.
inline constexpr std::uint64_t kStreamBlock = std::uint64_t{1} << 32;

/// Sub-stream k (k in {0, 1}) of a parent stream. The tag lives in the
/// top two stream-id bits, so derived streams can never collide with the
/// parent id range [0, 2^62) used for ensemble members, and the two
/// children of distinct parents stay distinct.
inline SeedSpec derive_substream(const SeedSpec& seed, std::uint64_t k) {
  const std::uint64_t body = seed.stream_id & ((std::uint64_t{1} << 62) - 1);
  return SeedSpec{seed.master_seed, body | ((k + 1) << 62)};
}

namespace detail {

// Philox 4x32-10 round function (Salmon et al., SC'11 constants).
struct PhiloxState {
  std::array<std::uint32_t, 4> counter;
  std::array<std::uint32_t, 2> key;
};

inline void philox_round(PhiloxState& s) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * s.counter[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * s.counter[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  s.counter = {hi1 ^ s.counter[1] ^ s.key[0], lo1,
               hi0 ^ s.counter[3] ^ s.key[1], lo0};
}

inline void philox_bump_key(PhiloxState& s) {
  s.key[0] += 0x9E3779B9u;  // golden ratio
  s.key[1] += 0xBB67AE85u;  // sqrt(3)-1
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
  PhiloxState s{ctr, key};
  for (int r = 0; r < 10; ++r) {
    philox_round(s);
    if (r != 9) philox_bump_key(s);
  }
  return s.counter;
}

}  // namespace detail

/// Sequential view of one counter-based stream.
///
/// Draw order is part of the reproducibility contract: callers consume
/// uniforms/normals in a fixed documented order and never share a
/// NormalStream across threads (streams themselves are cheap, make one per
/// task).
class NormalStream {
 public:
  explicit NormalStream(const SeedSpec& seed)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(seed.stream_id)),
        stream_hi_(static_cast<std::uint32_t>(seed.stream_id >> 32)) {}

  std::uint64_t next_u64() {
    if (block_pos_ == 2) {
      const auto words = detail::philox10(
          {static_cast<std::uint32_t>(block_index_),
           static_cast<std::uint32_t>(block_index_ >> 32), stream_lo_,
           stream_hi_},
          key_);
      block_[0] = (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
      block_[1] = (static_cast<std::uint64_t>(words[3]) << 32) | words[2];
      ++block_index_;
      block_pos_ = 0;
    }
    return block_[block_pos_++];
  }

  /// Uniform on (0, 1]; the closed right end keeps log(u) finite.
  double next_uniform() {
    constexpr double kScale = 0x1.0p-53;
    return 1.0 - static_cast<double>(next_u64() >> 11) * kScale;
  }

  /// Standard normal via Box-Muller; pairs are cached within the stream.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> block_{};
  int block_pos_ = 2;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace corrfilt

#endif  // CORRFILT_RNG_HPP
