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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "relaysim/rng.hpp"

namespace relaysim {

// Statistical description of the network: L relays with i.i.d. Rayleigh
// block fading on both hops. The convention used throughout is that the
// squared source-relay amplitude |g|^2 is exponential with mean
// 2*sigma_g2, and |h|^2 with mean 2*sigma_h2. Noise power at every
// receiver is normalized to one, so transmit powers are SNRs.
struct ChannelParams {
  int relays = 1;
  double sigma_g2 = 1.0;
  double sigma_h2 = 1.0;
  double noise_power = 1.0;

  void validate() const {
    if (relays < 1) throw std::domain_error("ChannelParams: relays must be >= 1");
    if (!(sigma_g2 > 0.0)) throw std::domain_error("ChannelParams: sigma_g2 must be > 0");
    if (!(sigma_h2 > 0.0)) throw std::domain_error("ChannelParams: sigma_h2 must be > 0");
    if (noise_power != 1.0)
      throw std::domain_error("ChannelParams: noise power is normalized to 1");
  }
};

// One block-fading draw: the amplitudes |g_i| and |h_i| for every relay.
// Squared entries are the channel power gains entering every rate formula.
struct SlotRealization {
  std::vector<double> g;
  std::vector<double> h;
  std::uint64_t slot_index = 0;
};

// Inverse-transform Rayleigh draw, x = sqrt(-2*sigma2*ln(u)) for u in
// (0, 1]. Then P(x^2 >= z) = exp(-z / (2*sigma2)).
inline double rayleigh_from_uniform(double u, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("rayleigh_from_uniform: sigma2 must be > 0");
  return std::sqrt(-2.0 * sigma2 * std::log(u));
}

// One addressed Rayleigh amplitude draw.
inline double sample_rayleigh_amplitude(RngStream stream, std::uint64_t draw_index,
                                        double sigma2) {
  return rayleigh_from_uniform(uniform_pair(stream, draw_index)[0], sigma2);
}

// Draws all 2L amplitudes of one slot into `out`, reusing its storage.
// Deterministic given (stream, slot_index).
inline void sample_slot_into(const ChannelParams& params, RngStream stream,
                             std::uint64_t slot_index, SlotRealization& out) {
  const auto relays = static_cast<std::size_t>(params.relays);
  out.g.resize(relays);
  out.h.resize(relays);
  out.slot_index = slot_index;
  const std::uint64_t base = slot_index * static_cast<std::uint64_t>(params.relays);
  for (std::size_t i = 0; i < relays; ++i) {
    const auto u = uniform_pair(stream, base + i);
    out.g[i] = rayleigh_from_uniform(u[0], params.sigma_g2);
    out.h[i] = rayleigh_from_uniform(u[1], params.sigma_h2);
  }
}

inline SlotRealization sample_slot(const ChannelParams& params, RngStream stream,
                                   std::uint64_t slot_index) {
  params.validate();
  SlotRealization slot;
  sample_slot_into(params, stream, slot_index, slot);
  return slot;
}

}  // namespace relaysim
