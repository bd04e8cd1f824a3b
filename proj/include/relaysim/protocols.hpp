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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "relaysim/channel.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/parallel.hpp"

namespace relaysim {

// The relaying protocols the simulator supports. CRS and DF operate in
// two-slot frames; SFD-MMRS and ADB are active in every slot.
enum class Protocol { crs, sfd_mmrs, df, adb };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::crs: return "CRS";
    case Protocol::sfd_mmrs: return "SFD-MMRS";
    case Protocol::df: return "DF";
    case Protocol::adb: return "ADB";
  }
  return "?";
}

inline std::optional<Protocol> protocol_from_string(std::string_view name) {
  if (name == "CRS") return Protocol::crs;
  if (name == "SFD-MMRS" || name == "SFD_MMRS") return Protocol::sfd_mmrs;
  if (name == "DF") return Protocol::df;
  if (name == "ADB") return Protocol::adb;
  return std::nullopt;
}

struct SimConfig {
  Protocol protocol = Protocol::crs;
  ChannelParams channel;
  double p_s = 1.0;                 // source transmit power (linear)
  double p_r = 1.0;                 // per-relay transmit power (linear)
  int group_size = 1;               // ADB: relays in group 1
  std::uint64_t n_slots = 1'000'000;
  std::uint64_t switch_period = 1;  // ADB queue simulation: slots per mode block
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const {
    channel.validate();
    if (p_s < 0.0 || p_r < 0.0) throw ConfigError("SimConfig: powers must be >= 0");
    if (n_slots < 2 || n_slots % 2 != 0)
      throw ConfigError("SimConfig: n_slots must be even and >= 2");
    if (workers < 1) throw ConfigError("SimConfig: workers must be >= 1");
    if (protocol == Protocol::sfd_mmrs && channel.relays < 2)
      throw ConfigError("SimConfig: SFD-MMRS needs at least 2 relays");
    if (protocol == Protocol::adb) {
      if (channel.relays < 2) throw ConfigError("SimConfig: ADB needs at least 2 relays");
      if (group_size < 1 || group_size > channel.relays - 1)
        throw ConfigError("SimConfig: ADB group_size must be in [1, relays-1]");
      if (switch_period < 1) throw ConfigError("SimConfig: switch_period must be >= 1");
      if ((n_slots / 2) % switch_period != 0)
        throw ConfigError("SimConfig: switch_period must divide n_slots/2");
    }
  }
};

struct ThroughputEstimate {
  double mean = 0.0;       // bps/Hz
  double std_error = 0.0;
  std::uint64_t n_slots = 0;
  std::map<std::string, double> aux;  // named sub-averages
};

// Buffer occupancy history of the ADB queue simulation. Relays within a
// group buffer the identical decoded message, so one fluid queue per group
// captures the whole state.
struct QueueTrace {
  std::vector<double> queue_g1;  // bits buffered after each slot
  std::vector<double> queue_g2;
  double delivered_bits = 0.0;
  double admitted_bits = 0.0;
  std::uint64_t slots = 0;
  double mean_queue_bits = 0.0;  // time average of the total buffered bits
};

namespace detail {

inline double log2_1p(double x) { return std::log2(1.0 + x); }

inline std::pair<double, double> mean_and_se(double sum, double sum_sq, std::uint64_t n) {
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace detail

// Instantaneous end-to-end rate of conventional relay selection for one
// two-slot frame: the best relay by the weaker of its two hops.
inline double crs_rate(const SlotRealization& slot, double p_s, double p_r) {
  double best = 0.0;
  for (std::size_t k = 0; k < slot.g.size(); ++k) {
    best = std::max(best, std::min(p_s * slot.g[k] * slot.g[k], p_r * slot.h[k] * slot.h[k]));
  }
  return 0.5 * detail::log2_1p(best);
}

// Instantaneous rate of decode-and-forward beamforming for one two-slot
// frame. Every relay must decode, so the first hop is limited by the worst
// source-relay link; the second hop gains the coherent sum of amplitudes.
inline double df_rate(const SlotRealization& slot, double p_s, double p_r) {
  double worst_g2 = std::numeric_limits<double>::infinity();
  double sum_h = 0.0;
  for (std::size_t k = 0; k < slot.g.size(); ++k) {
    worst_g2 = std::min(worst_g2, slot.g[k] * slot.g[k]);
    sum_h += slot.h[k];
  }
  return 0.5 * detail::log2_1p(std::min(p_s * worst_g2, p_r * sum_h * sum_h));
}

struct RelayChoice {
  int rx;  // relay receiving from the source
  int tx;  // relay transmitting to the destination
};

// SFD-MMRS link selection: best reception and best transmission relay,
// falling back to the stronger of the two second-best combinations when
// both point at the same relay. Never returns rx == tx. Argmax ties go to
// the lowest index; an exactly tied SNR comparison takes the
// (best-rx, second-tx) branch.
inline RelayChoice sfd_mmrs_select(const SlotRealization& slot, double p_s, double p_r) {
  const std::size_t relays = slot.g.size();
  if (relays < 2) throw ConfigError("sfd_mmrs_select: need at least 2 relays");

  std::size_t r1 = 0, t1 = 0;
  for (std::size_t i = 1; i < relays; ++i) {
    if (slot.g[i] > slot.g[r1]) r1 = i;
    if (slot.h[i] > slot.h[t1]) t1 = i;
  }
  if (r1 != t1) return {static_cast<int>(r1), static_cast<int>(t1)};

  std::size_t r2 = (r1 == 0) ? 1 : 0;
  std::size_t t2 = (t1 == 0) ? 1 : 0;
  for (std::size_t i = 0; i < relays; ++i) {
    if (i != r1 && slot.g[i] > slot.g[r2]) r2 = i;
    if (i != t1 && slot.h[i] > slot.h[t2]) t2 = i;
  }
  const double snr_g_r1 = p_s * slot.g[r1] * slot.g[r1];
  const double snr_g_r2 = p_s * slot.g[r2] * slot.g[r2];
  const double snr_h_t1 = p_r * slot.h[t1] * slot.h[t1];
  const double snr_h_t2 = p_r * slot.h[t2] * slot.h[t2];
  if (std::min(snr_g_r2, snr_h_t1) > std::min(snr_g_r1, snr_h_t2)) {
    return {static_cast<int>(r2), static_cast<int>(t1)};
  }
  return {static_cast<int>(r1), static_cast<int>(t2)};
}

// Throughput of SFD-MMRS: the weaker of the two average link rates, the
// source transmitting in every slot to the selected reception relay while
// the selected transmission relay forwards buffered data.
inline ThroughputEstimate simulate_sfd_mmrs(const SimConfig& cfg) {
  if (cfg.protocol != Protocol::sfd_mmrs)
    throw ConfigError("simulate_sfd_mmrs: config is for a different protocol");
  cfg.validate();
  const RngStream stream{cfg.seed, 0};

  std::atomic<bool> same_relay{false};
  const auto sums = detail::chunked_moment_reduce<2>(
      cfg.n_slots, cfg.workers, [&](std::uint64_t s, std::array<double, 2>& out) {
        thread_local SlotRealization slot;
        sample_slot_into(cfg.channel, stream, s, slot);
        const RelayChoice sel = sfd_mmrs_select(slot, cfg.p_s, cfg.p_r);
        if (sel.rx == sel.tx) same_relay.store(true, std::memory_order_relaxed);
        out[0] = detail::log2_1p(cfg.p_s * slot.g[sel.rx] * slot.g[sel.rx]);
        out[1] = detail::log2_1p(cfg.p_r * slot.h[sel.tx] * slot.h[sel.tx]);
      });
  if (same_relay.load())
    throw std::logic_error("sfd_mmrs_select returned rx == tx");

  const auto [sr_mean, sr_se] = detail::mean_and_se(sums.sum[0], sums.sum_sq[0], sums.count);
  const auto [rd_mean, rd_se] = detail::mean_and_se(sums.sum[1], sums.sum_sq[1], sums.count);
  ThroughputEstimate est;
  est.n_slots = cfg.n_slots;
  est.aux = {{"sr_mean", sr_mean}, {"sr_se", sr_se}, {"rd_mean", rd_mean}, {"rd_se", rd_se}};
  if (sr_mean <= rd_mean) {
    est.mean = sr_mean;
    est.std_error = sr_se;
  } else {
    est.mean = rd_mean;
    est.std_error = rd_se;
  }
  return est;
}

namespace detail {

// Mean per-slot statistics of the alternating two-group schedule for one
// slot draw: broadcast rate into each group and beamforming rate out of
// each group.
inline void adb_slot_rates(const SlotRealization& slot, double p_s, double p_r,
                           int group_size, std::array<double, 4>& out) {
  const std::size_t m = static_cast<std::size_t>(group_size);
  double min_g1 = std::numeric_limits<double>::infinity();
  double min_g2 = std::numeric_limits<double>::infinity();
  double sum_h1 = 0.0, sum_h2 = 0.0;
  for (std::size_t i = 0; i < slot.g.size(); ++i) {
    const double g2 = slot.g[i] * slot.g[i];
    if (i < m) {
      min_g1 = std::min(min_g1, g2);
      sum_h1 += slot.h[i];
    } else {
      min_g2 = std::min(min_g2, g2);
      sum_h2 += slot.h[i];
    }
  }
  out[0] = log2_1p(p_s * min_g1);           // reception_g1
  out[1] = log2_1p(p_r * sum_h1 * sum_h1);  // beamform_g1
  out[2] = log2_1p(p_s * min_g2);           // reception_g2
  out[3] = log2_1p(p_r * sum_h2 * sum_h2);  // beamform_g2
}

}  // namespace detail

// Flow-level ADB throughput: each group's flow is limited by the weaker of
// its average reception and beamforming rates, and each group owns half of
// the slots. All four averages are estimated over every drawn slot.
inline ThroughputEstimate adb_flow_estimate(const SimConfig& cfg) {
  if (cfg.protocol != Protocol::adb)
    throw ConfigError("adb_flow_estimate: config is for a different protocol");
  cfg.validate();
  const RngStream stream{cfg.seed, 0};

  const auto sums = detail::chunked_moment_reduce<4>(
      cfg.n_slots, cfg.workers, [&](std::uint64_t s, std::array<double, 4>& out) {
        thread_local SlotRealization slot;
        sample_slot_into(cfg.channel, stream, s, slot);
        detail::adb_slot_rates(slot, cfg.p_s, cfg.p_r, cfg.group_size, out);
      });

  static constexpr const char* kNames[4] = {"reception_g1", "beamform_g1", "reception_g2",
                                            "beamform_g2"};
  double mean[4], se[4];
  ThroughputEstimate est;
  est.n_slots = cfg.n_slots;
  for (int j = 0; j < 4; ++j) {
    std::tie(mean[j], se[j]) = detail::mean_and_se(sums.sum[j], sums.sum_sq[j], sums.count);
    est.aux[kNames[j]] = mean[j];
    est.aux[std::string(kNames[j]) + "_se"] = se[j];
  }
  const int bind1 = mean[0] <= mean[1] ? 0 : 1;
  const int bind2 = mean[2] <= mean[3] ? 2 : 3;
  est.mean = 0.5 * mean[bind1] + 0.5 * mean[bind2];
  // The four averages use disjoint fading draws, so their errors combine
  // independently.
  est.std_error = 0.5 * std::hypot(se[bind1], se[bind2]);
  return est;
}

// Slot-by-slot ADB queue simulation. The schedule alternates in blocks of
// switch_period slots: while one group decodes the broadcast into its
// buffer, the other drains its buffer through the beamformed link. Returns
// delivered-bits-per-slot and the queue trace; the long-run mean converges
// to adb_flow_estimate's value.
inline std::pair<ThroughputEstimate, QueueTrace> adb_queue_sim(const SimConfig& cfg) {
  if (cfg.protocol != Protocol::adb)
    throw ConfigError("adb_queue_sim: config is for a different protocol");
  cfg.validate();
  const RngStream stream{cfg.seed, 0};

  QueueTrace trace;
  trace.slots = cfg.n_slots;
  trace.queue_g1.reserve(cfg.n_slots);
  trace.queue_g2.reserve(cfg.n_slots);

  // Batch means over 100 batches absorb the autocorrelation the buffers
  // introduce into the per-slot delivered sequence.
  const std::uint64_t n_batches = std::min<std::uint64_t>(100, cfg.n_slots);
  const std::uint64_t batch_len = cfg.n_slots / n_batches;
  std::vector<double> batch_delivered(static_cast<std::size_t>(n_batches), 0.0);

  SlotRealization slot;
  double queue1 = 0.0, queue2 = 0.0, queue_integral = 0.0;
  for (std::uint64_t s = 0; s < cfg.n_slots; ++s) {
    sample_slot_into(cfg.channel, stream, s, slot);
    std::array<double, 4> rates;
    detail::adb_slot_rates(slot, cfg.p_s, cfg.p_r, cfg.group_size, rates);
    const bool group1_receives = (s / cfg.switch_period) % 2 == 0;
    double drained = 0.0;
    if (group1_receives) {
      queue1 += rates[0];
      trace.admitted_bits += rates[0];
      drained = std::min(queue2, rates[3]);
      queue2 -= drained;
    } else {
      queue2 += rates[2];
      trace.admitted_bits += rates[2];
      drained = std::min(queue1, rates[1]);
      queue1 -= drained;
    }
    trace.delivered_bits += drained;
    const std::uint64_t b = std::min(s / batch_len, n_batches - 1);
    batch_delivered[static_cast<std::size_t>(b)] += drained;
    trace.queue_g1.push_back(queue1);
    trace.queue_g2.push_back(queue2);
    queue_integral += queue1 + queue2;
  }
  trace.mean_queue_bits = queue_integral / static_cast<double>(cfg.n_slots);

  ThroughputEstimate est;
  est.n_slots = cfg.n_slots;
  est.mean = trace.delivered_bits / static_cast<double>(cfg.n_slots);
  double batch_sum = 0.0, batch_sum_sq = 0.0;
  for (double d : batch_delivered) {
    const double per_slot = d / static_cast<double>(batch_len);
    batch_sum += per_slot;
    batch_sum_sq += per_slot * per_slot;
  }
  est.std_error = detail::mean_and_se(batch_sum, batch_sum_sq, n_batches).second;
  est.aux = {{"mean_queue_bits", trace.mean_queue_bits},
             {"admitted_bits", trace.admitted_bits},
             {"delivered_bits", trace.delivered_bits}};
  return {est, trace};
}

namespace detail {

// CRS and DF consume one fresh realization per two-slot frame; their rate
// kernels already carry the 1/2 prefactor.
template <class RateKernel>
ThroughputEstimate simulate_frames(const SimConfig& cfg, RateKernel&& kernel) {
  const RngStream stream{cfg.seed, 0};
  const std::uint64_t frames = cfg.n_slots / 2;
  const auto sums = chunked_moment_reduce<1>(
      frames, cfg.workers, [&](std::uint64_t f, std::array<double, 1>& out) {
        thread_local SlotRealization slot;
        sample_slot_into(cfg.channel, stream, f, slot);
        out[0] = kernel(slot, cfg.p_s, cfg.p_r);
      });
  ThroughputEstimate est;
  est.n_slots = cfg.n_slots;
  std::tie(est.mean, est.std_error) = mean_and_se(sums.sum[0], sums.sum_sq[0], sums.count);
  est.aux["frames"] = static_cast<double>(frames);
  return est;
}

}  // namespace detail

// Protocol dispatch. Deterministic given (seed, workers): results are
// bit-identical for any worker count.
inline ThroughputEstimate simulate(const SimConfig& cfg) {
  cfg.validate();
  switch (cfg.protocol) {
    case Protocol::crs:
      return detail::simulate_frames(cfg, [](const SlotRealization& s, double ps, double pr) {
        return crs_rate(s, ps, pr);
      });
    case Protocol::df:
      return detail::simulate_frames(cfg, [](const SlotRealization& s, double ps, double pr) {
        return df_rate(s, ps, pr);
      });
    case Protocol::sfd_mmrs:
      return simulate_sfd_mmrs(cfg);
    case Protocol::adb:
      return adb_flow_estimate(cfg);
  }
  throw ConfigError("simulate: unknown protocol");
}

}  // namespace relaysim
