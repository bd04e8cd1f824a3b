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
#include <limits>
#include <numbers>
#include <stdexcept>

namespace relaysim {

namespace detail {

inline constexpr double kEulerGamma = 0.577215664901532860606512090082;

// Neumaier-compensated accumulator for the alternating sums in the
// closed-form rate expressions.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Continued fraction for exp(x)*E1(x) in modified Lentz form. Converges
// for x >= 1; the value equals 1/(x+1 - 1/(x+3 - 4/(x+5 - 9/(...)))).
inline double scaled_e1_continued_fraction(double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 20000; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

// Convergent series E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k/(k k!),
// used below the continued-fraction switchover.
inline double e1_series(double x) {
  CompensatedSum tail;
  double power_term = 1.0;  // (-x)^k / k!
  for (int k = 1; k <= 100; ++k) {
    power_term *= -x / k;
    const double term = -power_term / k;
    tail.add(term);
    if (std::abs(power_term) / k < 1e-18) break;
  }
  return -kEulerGamma - std::log(x) + tail.value();
}

}  // namespace detail

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0.
inline double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be > 0");
  if (x < 1.0) return detail::e1_series(x);
  return std::exp(-x) * detail::scaled_e1_continued_fraction(x);
}

// exp(x)*E1(x) evaluated in scaled form, finite for arbitrarily large x
// where the naive product would overflow. Always inside (1/(x+1), 1/x).
inline double scaled_exp_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("scaled_exp_e1: x must be > 0");
  if (x < 1.0) return std::exp(x) * detail::e1_series(x);
  return detail::scaled_e1_continued_fraction(x);
}

// (2m-1)!! = (2m-1)(2m-3)...3*1. Exact up to m = 17; larger products do
// not fit a 64-bit integer, use log_double_factorial_odd instead.
inline std::uint64_t double_factorial_odd(int m) {
  if (m < 1) throw std::domain_error("double_factorial_odd: m must be >= 1");
  if (m > 17) throw std::overflow_error("double_factorial_odd: exceeds 64-bit range, use log variant");
  std::uint64_t product = 1;
  for (int j = 1; j <= m; ++j) product *= static_cast<std::uint64_t>(2 * j - 1);
  return product;
}

// ln((2m-1)!!) for any m >= 1.
inline double log_double_factorial_odd(int m) {
  if (m < 1) throw std::domain_error("log_double_factorial_odd: m must be >= 1");
  double acc = 0.0;
  for (int j = 1; j <= m; ++j) acc += std::log(2.0 * j - 1.0);
  return acc;
}

// Parameters of the small argument approximation (SAA) to the distribution
// of the normalized sum t = (h_1 + ... + h_m)/sqrt(m) of m i.i.d. Rayleigh
// variables: b = (sigma_h2/m) * ((2m-1)!!)^(1/m).
struct SaaParams {
  int m;
  double sigma_h2;
  double b;

  SaaParams(int m_, double sigma_h2_) : m(m_), sigma_h2(sigma_h2_) {
    if (m < 1) throw std::domain_error("SaaParams: m must be >= 1");
    if (!(sigma_h2 > 0.0)) throw std::domain_error("SaaParams: sigma_h2 must be > 0");
    // Log-domain so that the m-th root stays finite past the 64-bit
    // double-factorial range.
    b = (m == 1) ? sigma_h2
                 : std::exp(std::log(sigma_h2) - std::log(static_cast<double>(m)) +
                            log_double_factorial_odd(m) / m);
  }
};

// SAA density f(t) = t^(2m-1) exp(-t^2/(2b)) / (2^(m-1) b^m (m-1)!).
inline double saa_pdf(double t, const SaaParams& p) {
  if (t < 0.0) throw std::domain_error("saa_pdf: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double log_pdf = (2.0 * p.m - 1.0) * std::log(t) - t * t / (2.0 * p.b) -
                         (p.m - 1.0) * std::numbers::ln2 - p.m * std::log(p.b) -
                         std::lgamma(static_cast<double>(p.m));
  return std::exp(log_pdf);
}

// SAA distribution F(t) = 1 - exp(-u) * sum_{k=0}^{m-1} u^k/k!, u = t^2/(2b).
inline double saa_cdf(double t, const SaaParams& p) {
  if (t < 0.0) throw std::domain_error("saa_cdf: t must be >= 0");
  const double u = t * t / (2.0 * p.b);
  double term = 1.0;
  double series = 1.0;
  for (int k = 1; k < p.m; ++k) {
    term *= u / k;
    series += term;
  }
  const double upper = std::exp(-u) * series;
  if (upper >= 1.0) return 0.0;
  if (upper <= 0.0) return 1.0;
  return 1.0 - upper;
}

// CDF of the minimum of m i.i.d. exponentials with mean 2*sigma2:
// F(z) = 1 - exp(-m z / (2 sigma2)). This is the law of min_i |g_i|^2.
inline double min_exponential_cdf(double z, int m, double sigma2) {
  if (z < 0.0) throw std::domain_error("min_exponential_cdf: z must be >= 0");
  if (m < 1) throw std::domain_error("min_exponential_cdf: m must be >= 1");
  if (!(sigma2 > 0.0)) throw std::domain_error("min_exponential_cdf: sigma2 must be > 0");
  return -std::expm1(-static_cast<double>(m) * z / (2.0 * sigma2));
}

}  // namespace relaysim
