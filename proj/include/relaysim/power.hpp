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
#include <functional>
#include <stdexcept>
#include <vector>

#include "relaysim/protocols.hpp"

namespace relaysim {

// Total-power budget of one scheme. The source transmits in every slot for
// ADB and SFD-MMRS; CRS and DF spread one transmission over two slots, so
// their per-slot energy constraint halves.
//   ADB:      p_s + (L/2) p_r <= snr_total
//   SFD-MMRS: p_s +  L    p_r <= snr_total
//   CRS, DF:  (p_s + L p_r)/2 <= snr_total
struct PowerBudget {
  double snr_total = 1.0;  // linear
  Protocol scheme = Protocol::adb;
  int relays = 2;

  void validate() const {
    if (!(snr_total > 0.0)) throw std::domain_error("PowerBudget: snr_total must be > 0");
    if (relays < 1) throw std::domain_error("PowerBudget: relays must be >= 1");
  }

  // Largest feasible source power on the tight constraint.
  double p_s_cap() const {
    return (scheme == Protocol::crs || scheme == Protocol::df) ? 2.0 * snr_total : snr_total;
  }

  // Left-hand side of the budget constraint.
  double constraint_lhs(double p_s, double p_r) const {
    switch (scheme) {
      case Protocol::adb: return p_s + 0.5 * relays * p_r;
      case Protocol::sfd_mmrs: return p_s + relays * p_r;
      case Protocol::crs:
      case Protocol::df: return 0.5 * (p_s + relays * p_r);
    }
    return 0.0;
  }

  bool satisfied(double p_s, double p_r, double rel_tol = 1e-9) const {
    return constraint_lhs(p_s, p_r) <= snr_total * (1.0 + rel_tol);
  }
};

// Relay power that makes the budget tight for the given source power.
inline double pr_from_ps(const PowerBudget& budget, double p_s) {
  budget.validate();
  if (p_s < 0.0 || p_s > budget.p_s_cap() * (1.0 + 1e-12))
    throw std::domain_error("pr_from_ps: p_s outside the feasible range");
  const double L = budget.relays;
  switch (budget.scheme) {
    case Protocol::adb: return std::max(0.0, 2.0 * (budget.snr_total - p_s) / L);
    case Protocol::sfd_mmrs: return std::max(0.0, (budget.snr_total - p_s) / L);
    case Protocol::crs:
    case Protocol::df: return std::max(0.0, (2.0 * budget.snr_total - p_s) / L);
  }
  throw std::domain_error("pr_from_ps: unknown scheme");
}

// Tight-budget powers for a target ratio p_s/p_r.
inline std::pair<double, double> powers_for_ratio(const PowerBudget& budget, double ratio) {
  budget.validate();
  if (!(ratio > 0.0)) throw std::domain_error("powers_for_ratio: ratio must be > 0");
  const double L = budget.relays;
  double p_r = 0.0;
  switch (budget.scheme) {
    case Protocol::adb: p_r = budget.snr_total / (ratio + 0.5 * L); break;
    case Protocol::sfd_mmrs: p_r = budget.snr_total / (ratio + L); break;
    case Protocol::crs:
    case Protocol::df: p_r = 2.0 * budget.snr_total / (ratio + L); break;
  }
  return {ratio * p_r, p_r};
}

// One throughput evaluation. std_error is zero for noise-free evaluators.
struct Evaluation {
  double value = 0.0;
  double std_error = 0.0;
};

using PowerEvaluator = std::function<Evaluation(double p_s, double p_r)>;

struct MaximizeOptions {
  int grid_points = 64;     // coarse scan of the tight line
  double rho_tol = 1e-4;    // refinement tolerance on p_s / p_s_cap
};

struct PowerSolution {
  double p_s = 0.0;
  double p_r = 0.0;
  double throughput = 0.0;
  double std_error = 0.0;
  std::uint64_t evaluations = 0;
  bool binding = true;  // budget tight at the returned point
};

// Maximizes throughput over the budget-tight line. Throughput is
// nondecreasing in each power, so the optimum lies on the tight
// constraint; the 1-D search over rho = p_s/cap uses a coarse grid (a
// guard against multi-modality) followed by golden-section refinement.
// With a noisy evaluator, refinement stops once the two probes are within
// two combined standard errors of each other.
inline PowerSolution maximize(const PowerBudget& budget, const PowerEvaluator& evaluate,
                              const MaximizeOptions& opts = {}) {
  budget.validate();
  if (opts.grid_points < 2) throw std::domain_error("maximize: grid_points must be >= 2");
  const double cap = budget.p_s_cap();

  PowerSolution best;
  std::uint64_t evaluations = 0;
  bool have_best = false;

  auto probe = [&](double rho) -> Evaluation {
    const double p_s = rho * cap;
    const double p_r = pr_from_ps(budget, p_s);
    const Evaluation e = evaluate(p_s, p_r);
    ++evaluations;
    if (!have_best || e.value > best.throughput) {
      best.p_s = p_s;
      best.p_r = p_r;
      best.throughput = e.value;
      best.std_error = e.std_error;
      have_best = true;
    }
    return e;
  };

  const int G = opts.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(G));
  std::vector<double> grid_value(static_cast<std::size_t>(G));
  int best_idx = 0;
  for (int i = 0; i < G; ++i) {
    grid[i] = static_cast<double>(i + 1) / (G + 1);
    grid_value[i] = probe(grid[i]).value;
    if (grid_value[i] > grid_value[best_idx]) best_idx = i;
  }

  double lo = (best_idx > 0) ? grid[best_idx - 1] : grid[0] * 0.5;
  double hi = (best_idx < G - 1) ? grid[best_idx + 1] : 0.5 * (grid[G - 1] + 1.0);

  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  Evaluation fc = probe(c);
  Evaluation fd = probe(d);
  while (hi - lo > opts.rho_tol) {
    if (fc.std_error > 0.0 && fd.std_error > 0.0 &&
        std::abs(fc.value - fd.value) < 2.0 * std::hypot(fc.std_error, fd.std_error)) {
      break;  // probes are statistically indistinguishable
    }
    if (fc.value > fd.value) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = probe(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = probe(d);
    }
  }

  best.evaluations = evaluations;
  best.binding = budget.satisfied(best.p_s, best.p_r, 1e-12) &&
                 budget.constraint_lhs(best.p_s, best.p_r) >=
                     budget.snr_total * (1.0 - 1e-12);
  return best;
}

}  // namespace relaysim
