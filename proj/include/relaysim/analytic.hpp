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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "relaysim/special_math.hpp"

namespace relaysim {

namespace detail {

inline std::atomic<std::uint64_t> negative_clamp_counter{0};

}  // namespace detail

// How many closed-form evaluations rounded to a (tiny) negative value and
// were clamped to zero. Diagnostic only; grows when the alternating sums
// are evaluated far outside their well-conditioned range.
inline std::uint64_t negative_clamp_count() {
  return detail::negative_clamp_counter.load(std::memory_order_relaxed);
}

inline void reset_negative_clamp_count() {
  detail::negative_clamp_counter.store(0, std::memory_order_relaxed);
}

// Expected broadcast rate into a group of `group_size` relays,
// E[log2(1 + p_s * min_i |g_i|^2)]. The minimum of the squared gains is
// exponential with mean 2*sigma_g2/group_size, which gives the exact value
// exp(x) E1(x) / ln 2 with x = group_size / (2 sigma_g2 p_s).
inline double group_reception_rate(double p_s, int group_size, double sigma_g2) {
  if (p_s < 0.0) throw std::domain_error("group_reception_rate: p_s must be >= 0");
  if (group_size < 1) throw std::domain_error("group_reception_rate: group_size must be >= 1");
  if (!(sigma_g2 > 0.0)) throw std::domain_error("group_reception_rate: sigma_g2 must be > 0");
  if (p_s == 0.0) return 0.0;
  const double x = group_size / (2.0 * sigma_g2 * p_s);
  return scaled_exp_e1(x) / std::numbers::ln2;
}

// Expected beamforming rate of a group of `group_size` relays toward the
// destination, E[log2(1 + p_r * (sum_i |h_i|)^2)], evaluated under the SAA
// law for the Rayleigh sum. With x0 = 1/(2 b p_r m) the expression reduces
// to
//   ln2 * rate = exp(x0)E1(x0) * sum_{k=0}^{m-1} (-x0)^k/k!
//              + sum_{k=1}^{m-1} (1/k!) sum_{s=1}^{k} (s-1)! (-x0)^{k-s}.
// The alternating sums are accumulated with compensated summation; they are
// well conditioned for m <= 15 over the power ranges the sweeps use.
inline double group_beamform_rate(double p_r, int group_size, double sigma_h2) {
  if (p_r < 0.0) throw std::domain_error("group_beamform_rate: p_r must be >= 0");
  if (group_size < 1) throw std::domain_error("group_beamform_rate: group_size must be >= 1");
  if (!(sigma_h2 > 0.0)) throw std::domain_error("group_beamform_rate: sigma_h2 must be > 0");
  if (p_r == 0.0) return 0.0;

  const SaaParams saa(group_size, sigma_h2);
  const int m = group_size;
  const double x0 = 1.0 / (2.0 * saa.b * p_r * m);

  detail::CompensatedSum partial_exp;  // sum_{k=0}^{m-1} (-x0)^k / k!
  double pow_term = 1.0;
  partial_exp.add(1.0);
  for (int k = 1; k < m; ++k) {
    pow_term *= -x0 / k;
    partial_exp.add(pow_term);
  }

  // powers[j] = (-x0)^j, ascending so underflow only hits negligible terms.
  std::vector<double> powers(static_cast<std::size_t>(m > 1 ? m - 1 : 1), 1.0);
  for (std::size_t j = 1; j < powers.size(); ++j) powers[j] = powers[j - 1] * -x0;

  detail::CompensatedSum tail;
  double k_factorial = 1.0;
  for (int k = 1; k < m; ++k) {
    k_factorial *= k;
    double s_minus_1_factorial = 1.0;
    for (int s = 1; s <= k; ++s) {
      tail.add(s_minus_1_factorial * powers[static_cast<std::size_t>(k - s)] / k_factorial);
      s_minus_1_factorial *= s;
    }
  }

  double total = scaled_exp_e1(x0) * partial_exp.value() + tail.value();
  if (total < 0.0) {
    detail::negative_clamp_counter.fetch_add(1, std::memory_order_relaxed);
    total = 0.0;
  }
  return total / std::numbers::ln2;
}

// Configuration of the two-group alternating schedule: group 1 holds
// `group_size` relays, group 2 the remaining relays - group_size.
struct AdbAnalyticConfig {
  int relays = 2;       // L
  int group_size = 1;   // relays in group 1
  double sigma_g2 = 1.0;
  double sigma_h2 = 1.0;
  double p_s = 1.0;
  double p_r = 1.0;

  void validate() const {
    if (relays < 2) throw std::domain_error("AdbAnalyticConfig: need at least 2 relays");
    if (group_size < 1 || group_size > relays - 1)
      throw std::domain_error("AdbAnalyticConfig: group_size must be in [1, relays-1]");
    if (!(sigma_g2 > 0.0) || !(sigma_h2 > 0.0))
      throw std::domain_error("AdbAnalyticConfig: variances must be > 0");
    if (p_s < 0.0 || p_r < 0.0)
      throw std::domain_error("AdbAnalyticConfig: powers must be >= 0");
  }
};

// Which hop limits each group's flow at the analysed operating point.
enum class AdbActiveCase {
  both_source_limited,
  g1_source_g2_relay,
  g1_relay_g2_source,
  both_relay_limited,
};

struct AdbAnalyticResult {
  double reception_g1 = 0.0;  // source -> group 1 broadcast rate
  double beamform_g1 = 0.0;   // group 1 -> destination beamforming rate
  double reception_g2 = 0.0;
  double beamform_g2 = 0.0;
  double throughput = 0.0;    // bps/Hz
  AdbActiveCase active_case = AdbActiveCase::both_source_limited;
};

// Approximate closed-form throughput of the alternating schedule:
// 1/2 min(reception_g1, beamform_g1) + 1/2 min(reception_g2, beamform_g2).
inline AdbAnalyticResult adb_closed_form(const AdbAnalyticConfig& cfg) {
  cfg.validate();
  AdbAnalyticResult r;
  r.reception_g1 = group_reception_rate(cfg.p_s, cfg.group_size, cfg.sigma_g2);
  r.reception_g2 = group_reception_rate(cfg.p_s, cfg.relays - cfg.group_size, cfg.sigma_g2);
  r.beamform_g1 = group_beamform_rate(cfg.p_r, cfg.group_size, cfg.sigma_h2);
  r.beamform_g2 = group_beamform_rate(cfg.p_r, cfg.relays - cfg.group_size, cfg.sigma_h2);

  const bool g1_source = r.reception_g1 < r.beamform_g1;
  const bool g2_source = r.reception_g2 < r.beamform_g2;
  const double flow1 = g1_source ? r.reception_g1 : r.beamform_g1;
  const double flow2 = g2_source ? r.reception_g2 : r.beamform_g2;
  r.throughput = 0.5 * flow1 + 0.5 * flow2;
  r.active_case = g1_source ? (g2_source ? AdbActiveCase::both_source_limited
                                         : AdbActiveCase::g1_source_g2_relay)
                            : (g2_source ? AdbActiveCase::g1_relay_g2_source
                                         : AdbActiveCase::both_relay_limited);
  return r;
}

}  // namespace relaysim
