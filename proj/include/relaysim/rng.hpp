/*
   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>

namespace relaysim {

// Counter-based random numbers built on Philox 4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC 2011). Every draw is
// addressed by (seed, stream_id, block index), so a simulation slot can be
// regenerated independently of all others and in any order. That makes the
// results bit-identical regardless of how slots are partitioned across
// worker threads.

struct PhiloxBlock {
  std::uint32_t w[4];
};

namespace detail {

inline PhiloxBlock philox4x32(PhiloxBlock ctr, std::uint32_t k0, std::uint32_t k1) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t m0 = std::uint64_t{kMul0} * ctr.w[0];
    const std::uint64_t m1 = std::uint64_t{kMul1} * ctr.w[2];
    ctr = PhiloxBlock{{static_cast<std::uint32_t>(m1 >> 32) ^ ctr.w[1] ^ k0,
                       static_cast<std::uint32_t>(m1),
                       static_cast<std::uint32_t>(m0 >> 32) ^ ctr.w[3] ^ k1,
                       static_cast<std::uint32_t>(m0)}};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

}  // namespace detail

// Stateless stream handle. Streams with distinct stream_id under the same
// seed produce statistically independent sequences; identical
// (seed, stream_id) replays the identical sequence.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint32_t stream_id = 0;
};

// The two 64-bit words of the given block of a stream.
inline std::array<std::uint64_t, 2> random_block(RngStream stream, std::uint64_t block) {
  const PhiloxBlock ctr{{static_cast<std::uint32_t>(block),
                         static_cast<std::uint32_t>(block >> 32),
                         stream.stream_id, 0u}};
  const PhiloxBlock out =
      detail::philox4x32(ctr, static_cast<std::uint32_t>(stream.seed),
                         static_cast<std::uint32_t>(stream.seed >> 32));
  return {out.w[0] | (std::uint64_t{out.w[1]} << 32),
          out.w[2] | (std::uint64_t{out.w[3]} << 32)};
}

// Maps 64 random bits to a uniform on (0, 1]. Zero is excluded so that
// log(u) is always finite.
inline double uniform_from_bits(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Pair of (0,1] uniforms for one block address.
inline std::array<double, 2> uniform_pair(RngStream stream, std::uint64_t block) {
  const auto words = random_block(stream, block);
  return {uniform_from_bits(words[0]), uniform_from_bits(words[1])};
}

}  // namespace relaysim
