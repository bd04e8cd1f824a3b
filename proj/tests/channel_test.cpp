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

#include "relaysim/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "relaysim/rng.hpp"
#include "support/oracles.hpp"

namespace rs = relaysim;

TEST(Philox, ReferenceVectors) {
  // Known-answer vectors from the Random123 distribution.
  const rs::PhiloxBlock zero = rs::detail::philox4x32({{0, 0, 0, 0}}, 0, 0);
  EXPECT_EQ(zero.w[0], 0x6627e8d5u);
  EXPECT_EQ(zero.w[1], 0xe169c58du);
  EXPECT_EQ(zero.w[2], 0xbc57ac4cu);
  EXPECT_EQ(zero.w[3], 0x9b00dbd8u);

  const rs::PhiloxBlock ones = rs::detail::philox4x32(
      {{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}}, 0xffffffffu, 0xffffffffu);
  EXPECT_EQ(ones.w[0], 0x408f276du);
  EXPECT_EQ(ones.w[1], 0x41c83b0eu);
  EXPECT_EQ(ones.w[2], 0xa20bc7c6u);
  EXPECT_EQ(ones.w[3], 0x6d5451fdu);

  const rs::PhiloxBlock pi = rs::detail::philox4x32(
      {{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}}, 0xa4093822u, 0x299f31d0u);
  EXPECT_EQ(pi.w[0], 0xd16cfe09u);
  EXPECT_EQ(pi.w[1], 0x94fdccebu);
  EXPECT_EQ(pi.w[2], 0x5001e420u);
  EXPECT_EQ(pi.w[3], 0x24126ea1u);
}

TEST(RngStream, ReplayAndDisjointness) {
  const rs::RngStream a{12345, 0};
  const rs::RngStream a_again{12345, 0};
  const rs::RngStream b{12345, 1};
  for (std::uint64_t i = 0; i < 64; ++i) {
    EXPECT_EQ(rs::random_block(a, i), rs::random_block(a_again, i));
    EXPECT_NE(rs::random_block(a, i), rs::random_block(b, i));
  }
}

TEST(RngStream, CrossStreamCorrelationIsSmall) {
  const std::size_t n = 100000;
  std::vector<double> u0, u1;
  u0.reserve(n);
  u1.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    u0.push_back(rs::uniform_pair({42, 0}, i)[0]);
    u1.push_back(rs::uniform_pair({42, 1}, i)[0]);
  }
  EXPECT_LE(std::abs(oracles::pearson_correlation(u0, u1)), 0.01);
}

TEST(Uniform, RangeIsHalfOpenAtZero) {
  EXPECT_DOUBLE_EQ(rs::uniform_from_bits(~0ull), 1.0);
  EXPECT_GT(rs::uniform_from_bits(0ull), 0.0);  // zero bits still map above 0
}

TEST(Rayleigh, EndpointAndDomain) {
  EXPECT_EQ(rs::rayleigh_from_uniform(1.0, 1.0), 0.0);  // u = 1 -> amplitude 0
  EXPECT_THROW(rs::rayleigh_from_uniform(0.5, 0.0), std::domain_error);
  EXPECT_THROW(rs::rayleigh_from_uniform(0.5, -2.0), std::domain_error);
}

TEST(Rayleigh, SquaredAmplitudeMoments) {
  // |x|^2 should be exponential with mean 2*sigma2.
  const rs::RngStream stream{7, 3};
  const std::uint64_t n = 1000000;
  double sum_sq = 0.0;
  std::uint64_t exceed = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = rs::sample_rayleigh_amplitude(stream, i, 1.0);
    sum_sq += x * x;
    if (x * x >= 2.0) ++exceed;
  }
  EXPECT_NEAR(sum_sq / n, 2.0, 0.02);
  EXPECT_NEAR(static_cast<double>(exceed) / n, std::exp(-1.0), 0.01);
}

TEST(Rayleigh, DistributionLawKolmogorovSmirnov) {
  for (double sigma2 : {0.5, 1.0, 2.5}) {
    const rs::RngStream stream{11, 5};
    const std::uint64_t n = 1000000;
    std::vector<double> squared;
    squared.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double x = rs::sample_rayleigh_amplitude(stream, i, sigma2);
      squared.push_back(x * x);
    }
    const double d = oracles::ks_distance(std::move(squared), [&](double z) {
      return 1.0 - std::exp(-z / (2.0 * sigma2));
    });
    EXPECT_LE(d, 0.005) << "sigma2=" << sigma2;
  }
}

TEST(ChannelParams, Validation) {
  EXPECT_THROW((rs::ChannelParams{0, 1.0, 1.0, 1.0}).validate(), std::domain_error);
  EXPECT_THROW((rs::ChannelParams{2, 0.0, 1.0, 1.0}).validate(), std::domain_error);
  EXPECT_THROW((rs::ChannelParams{2, 1.0, -1.0, 1.0}).validate(), std::domain_error);
  EXPECT_THROW((rs::ChannelParams{2, 1.0, 1.0, 2.0}).validate(), std::domain_error);
  EXPECT_NO_THROW((rs::ChannelParams{2, 1.0, 1.0, 1.0}).validate());
}

TEST(SampleSlot, ShapeAndDeterminism) {
  const rs::ChannelParams params{1, 1.0, 1.0, 1.0};
  const rs::RngStream stream{3, 0};
  const auto slot = rs::sample_slot(params, stream, 17);
  EXPECT_EQ(slot.g.size(), 1u);
  EXPECT_EQ(slot.h.size(), 1u);
  EXPECT_EQ(slot.slot_index, 17u);

  const auto replay = rs::sample_slot(params, stream, 17);
  EXPECT_EQ(slot.g, replay.g);
  EXPECT_EQ(slot.h, replay.h);

  const auto other = rs::sample_slot(params, stream, 18);
  EXPECT_NE(slot.g, other.g);
}

TEST(SampleSlot, PerRelayMoments) {
  const int relays = 4;
  const rs::ChannelParams params{relays, 1.0, 1.0, 1.0};
  const rs::RngStream stream{2024, 0};
  const std::uint64_t n = 100000;
  std::vector<double> sum_g2(relays, 0.0), sum_h2(relays, 0.0);
  rs::SlotRealization slot;
  for (std::uint64_t s = 0; s < n; ++s) {
    rs::sample_slot_into(params, stream, s, slot);
    for (int i = 0; i < relays; ++i) {
      sum_g2[i] += slot.g[i] * slot.g[i];
      sum_h2[i] += slot.h[i] * slot.h[i];
    }
  }
  for (int i = 0; i < relays; ++i) {
    EXPECT_NEAR(sum_g2[i] / n, 2.0, 0.06) << "relay " << i;
    EXPECT_NEAR(sum_h2[i] / n, 2.0, 0.06) << "relay " << i;
  }
}

TEST(SampleSlot, IndependenceProxies) {
  // Correlations across relays and across hops should vanish.
  const int relays = 3;
  const rs::ChannelParams params{relays, 1.0, 1.0, 1.0};
  const rs::RngStream stream{77, 0};
  const std::uint64_t n = 1000000;
  std::vector<double> g0, g1, h0;
  g0.reserve(n);
  g1.reserve(n);
  h0.reserve(n);
  rs::SlotRealization slot;
  for (std::uint64_t s = 0; s < n; ++s) {
    rs::sample_slot_into(params, stream, s, slot);
    g0.push_back(slot.g[0]);
    g1.push_back(slot.g[1]);
    h0.push_back(slot.h[0]);
  }
  EXPECT_LE(std::abs(oracles::pearson_correlation(g0, g1)), 0.01);
  EXPECT_LE(std::abs(oracles::pearson_correlation(g0, h0)), 0.01);
}
