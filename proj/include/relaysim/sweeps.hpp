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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "relaysim/analytic.hpp"
#include "relaysim/errors.hpp"
#include "relaysim/power.hpp"
#include "relaysim/protocols.hpp"

namespace relaysim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

enum class SweepKind { ratio_sweep, snr_sweep, grouping_sweep, relay_count_sweep, single_point };

// A figure-style experiment: which schemes to run over which grid. The
// grid's meaning depends on the kind: p_s/p_r ratios, SNR values in dB,
// group sizes, or relay counts.
struct ExperimentSpec {
  SweepKind kind = SweepKind::single_point;
  std::vector<Protocol> schemes = {Protocol::adb};
  std::vector<double> grid;
  double snr_db = 10.0;
  int relays = 4;
  int group_size = 0;  // 0 = default (relays/2)
  double sigma_g2 = 1.0;
  double sigma_h2 = 1.0;
  std::uint64_t n_slots = 1'000'000;
  std::uint64_t search_slots = 0;  // 0 = derived from n_slots
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint64_t switch_period = 1;
  std::string out;  // empty = stdout
  bool analytic_only = false;
  bool json_lines = false;
  int opt_grid_points = 64;

  // Power-search evaluations run on a reduced slot count; emitted rows are
  // re-evaluated at the full n_slots.
  std::uint64_t effective_search_slots() const {
    std::uint64_t s = search_slots ? search_slots : std::max<std::uint64_t>(n_slots / 5, 100'000);
    s = std::min(s, n_slots);
    if (s % 2) --s;
    return std::max<std::uint64_t>(s, 2);
  }

  void validate() const {
    if (schemes.empty()) throw ConfigError("experiment: schemes must not be empty", "schemes");
    if (grid.empty()) throw ConfigError("experiment: sweep grid must not be empty", "grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1]))
        throw ConfigError("experiment: sweep grid must be strictly increasing", "grid");
    }
    if ((kind == SweepKind::ratio_sweep || kind == SweepKind::single_point) && grid.front() <= 0.0)
      throw ConfigError("experiment: ratios must be > 0", "grid");
    if (relays < 1) throw ConfigError("experiment: relays must be >= 1", "relays");
    if (!(sigma_g2 > 0.0)) throw ConfigError("experiment: sigma_g2 must be > 0", "sigma_g2");
    if (!(sigma_h2 > 0.0)) throw ConfigError("experiment: sigma_h2 must be > 0", "sigma_h2");
    if (n_slots < 2 || n_slots % 2)
      throw ConfigError("experiment: slots must be even and >= 2", "slots");
    if (workers < 1) throw ConfigError("experiment: workers must be >= 1", "workers");
    if (opt_grid_points < 2)
      throw ConfigError("experiment: opt_grid_points must be >= 2", "opt_grid_points");
  }
};

// One output record. Analytic rows carry std_error = 0 and n_slots = 0.
struct ResultRow {
  Protocol scheme = Protocol::adb;
  std::string estimator;  // "sim" or "analytic"
  std::string sweep_name;
  double sweep_value = 0.0;
  int relays = 0;
  int group_size = 0;  // 0 for schemes without grouping
  double p_s = 0.0;
  double p_r = 0.0;
  double snr_total = 0.0;
  double throughput = 0.0;
  double std_error = 0.0;
  std::uint64_t n_slots = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
};

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append_number(std::string& out, std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append_number(std::string& out, int v) {
  char buf[16];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "scheme,estimator,sweep_name,sweep_value,L,m,p_s,p_r,snr_total,throughput,std_error,"
    "n_slots,seed";

// Shortest round-trip number formatting keeps the output byte-stable across
// runs and worker counts.
inline std::string to_csv_line(const ResultRow& r) {
  std::string line;
  line += to_string(r.scheme);
  line += ',';
  line += r.estimator;
  line += ',';
  line += r.sweep_name;
  line += ',';
  detail::append_number(line, r.sweep_value);
  line += ',';
  detail::append_number(line, r.relays);
  line += ',';
  detail::append_number(line, r.group_size);
  line += ',';
  detail::append_number(line, r.p_s);
  line += ',';
  detail::append_number(line, r.p_r);
  line += ',';
  detail::append_number(line, r.snr_total);
  line += ',';
  detail::append_number(line, r.throughput);
  line += ',';
  detail::append_number(line, r.std_error);
  line += ',';
  detail::append_number(line, r.n_slots);
  line += ',';
  detail::append_number(line, r.seed);
  return line;
}

inline std::string to_json_line(const ResultRow& r) {
  std::string line = "{\"scheme\":\"";
  line += to_string(r.scheme);
  line += "\",\"estimator\":\"";
  line += r.estimator;
  line += "\",\"sweep_name\":\"";
  line += r.sweep_name;
  line += "\",\"sweep_value\":";
  detail::append_number(line, r.sweep_value);
  line += ",\"L\":";
  detail::append_number(line, r.relays);
  line += ",\"m\":";
  detail::append_number(line, r.group_size);
  line += ",\"p_s\":";
  detail::append_number(line, r.p_s);
  line += ",\"p_r\":";
  detail::append_number(line, r.p_r);
  line += ",\"snr_total\":";
  detail::append_number(line, r.snr_total);
  line += ",\"throughput\":";
  detail::append_number(line, r.throughput);
  line += ",\"std_error\":";
  detail::append_number(line, r.std_error);
  line += ",\"n_slots\":";
  detail::append_number(line, r.n_slots);
  line += ",\"seed\":";
  detail::append_number(line, r.seed);
  line += '}';
  return line;
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

inline void write_json_lines(const std::vector<ResultRow>& rows, std::ostream& os) {
  for (const auto& r : rows) os << to_json_line(r) << '\n';
}

namespace detail {

inline int adb_group_size(const ExperimentSpec& spec, int relays) {
  return spec.group_size > 0 ? spec.group_size : relays / 2;
}

inline SimConfig base_sim_config(const ExperimentSpec& spec, Protocol scheme, int relays,
                                 int group_size) {
  SimConfig cfg;
  cfg.protocol = scheme;
  cfg.channel = ChannelParams{relays, spec.sigma_g2, spec.sigma_h2, 1.0};
  cfg.group_size = group_size;
  cfg.n_slots = spec.n_slots;
  cfg.switch_period = 1;
  cfg.seed = spec.seed;
  cfg.workers = spec.workers;
  return cfg;
}

// Every row must sit on its scheme's budget; a violation here is a bug.
inline void check_budget(const PowerBudget& budget, const ResultRow& row) {
  if (!budget.satisfied(row.p_s, row.p_r))
    throw std::logic_error("emitted row violates the power budget");
}

inline ResultRow make_row(const ExperimentSpec& spec, Protocol scheme, const char* estimator,
                          const std::string& sweep_name, double sweep_value, int relays,
                          int group_size, double p_s, double p_r, double snr_total) {
  ResultRow row;
  row.scheme = scheme;
  row.estimator = estimator;
  row.sweep_name = sweep_name;
  row.sweep_value = sweep_value;
  row.relays = relays;
  row.group_size = scheme == Protocol::adb ? group_size : 0;
  row.p_s = p_s;
  row.p_r = p_r;
  row.snr_total = snr_total;
  row.seed = spec.seed;
  return row;
}

inline PowerEvaluator sim_evaluator(const ExperimentSpec& spec, Protocol scheme, int relays,
                                    int group_size) {
  SimConfig cfg = base_sim_config(spec, scheme, relays, group_size);
  cfg.n_slots = spec.effective_search_slots();
  return [cfg](double p_s, double p_r) mutable -> Evaluation {
    cfg.p_s = p_s;
    cfg.p_r = p_r;
    const ThroughputEstimate est = simulate(cfg);
    return {est.mean, est.std_error};
  };
}

inline PowerEvaluator analytic_adb_evaluator(const ExperimentSpec& spec, int relays,
                                             int group_size) {
  AdbAnalyticConfig cfg;
  cfg.relays = relays;
  cfg.group_size = group_size;
  cfg.sigma_g2 = spec.sigma_g2;
  cfg.sigma_h2 = spec.sigma_h2;
  return [cfg](double p_s, double p_r) mutable -> Evaluation {
    cfg.p_s = p_s;
    cfg.p_r = p_r;
    return {adb_closed_form(cfg).throughput, 0.0};
  };
}

// Optimizes powers for one scheme at one grid point and appends the C_max
// rows: a simulated row (re-evaluated at the full slot count at the argmax)
// and, for ADB, an analytic row from the closed form.
inline void append_cmax_rows(const ExperimentSpec& spec, Protocol scheme, int relays,
                             int group_size, double snr_linear, const std::string& sweep_name,
                             double sweep_value, SweepResult& result) {
  const PowerBudget budget{snr_linear, scheme, relays};
  const MaximizeOptions opts{spec.opt_grid_points, 1e-4};

  if (scheme == Protocol::adb) {
    const PowerSolution analytic =
        maximize(budget, analytic_adb_evaluator(spec, relays, group_size), opts);
    ResultRow row = make_row(spec, scheme, "analytic", sweep_name, sweep_value, relays,
                             group_size, analytic.p_s, analytic.p_r, snr_linear);
    row.throughput = analytic.throughput;
    check_budget(budget, row);
    result.rows.push_back(row);
  }
  if (spec.analytic_only) return;

  const PowerSolution sol = maximize(budget, sim_evaluator(spec, scheme, relays, group_size), opts);
  SimConfig cfg = base_sim_config(spec, scheme, relays, group_size);
  cfg.p_s = sol.p_s;
  cfg.p_r = sol.p_r;
  const ThroughputEstimate est = simulate(cfg);
  ResultRow row = make_row(spec, scheme, "sim", sweep_name, sweep_value, relays, group_size,
                           sol.p_s, sol.p_r, snr_linear);
  row.throughput = est.mean;
  row.std_error = est.std_error;
  row.n_slots = est.n_slots;
  check_budget(budget, row);
  result.rows.push_back(row);
}

}  // namespace detail

// Throughput of every scheme as the power split p_s/p_r varies on each
// scheme's tight budget line. Emits simulated rows for all schemes plus
// analytic rows for ADB.
inline SweepResult run_ratio_sweep(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  const double snr = db_to_linear(spec.snr_db);
  const int group_size = detail::adb_group_size(spec, spec.relays);
  const std::string sweep_name = "ratio";

  for (double ratio : spec.grid) {
    for (Protocol scheme : spec.schemes) {
      if (scheme == Protocol::adb &&
          (group_size < 1 || group_size > spec.relays - 1)) {
        result.warnings.push_back("skipped ADB: group size invalid for relays=" +
                                  std::to_string(spec.relays));
        continue;
      }
      const PowerBudget budget{snr, scheme, spec.relays};
      const auto [p_s, p_r] = powers_for_ratio(budget, ratio);

      if (scheme == Protocol::adb) {
        AdbAnalyticConfig acfg{spec.relays, group_size, spec.sigma_g2, spec.sigma_h2, p_s, p_r};
        ResultRow row = detail::make_row(spec, scheme, "analytic", sweep_name, ratio,
                                         spec.relays, group_size, p_s, p_r, snr);
        row.throughput = adb_closed_form(acfg).throughput;
        detail::check_budget(budget, row);
        result.rows.push_back(row);
      }
      if (spec.analytic_only) {
        if (scheme != Protocol::adb)
          result.warnings.push_back(std::string("no analytic form for ") + to_string(scheme) +
                                    "; skipped");
        continue;
      }

      SimConfig cfg = detail::base_sim_config(spec, scheme, spec.relays, group_size);
      cfg.p_s = p_s;
      cfg.p_r = p_r;
      const ThroughputEstimate est = simulate(cfg);
      ResultRow row = detail::make_row(spec, scheme, "sim", sweep_name, ratio, spec.relays,
                                       group_size, p_s, p_r, snr);
      row.throughput = est.mean;
      row.std_error = est.std_error;
      row.n_slots = est.n_slots;
      detail::check_budget(budget, row);
      result.rows.push_back(row);
    }
  }
  return result;
}

// Maximum achievable throughput (optimized power split) per scheme as the
// total power budget varies.
inline SweepResult run_snr_sweep(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  const int group_size = detail::adb_group_size(spec, spec.relays);
  for (double snr_db : spec.grid) {
    for (Protocol scheme : spec.schemes) {
      if (scheme == Protocol::adb && (group_size < 1 || group_size > spec.relays - 1)) {
        result.warnings.push_back("skipped ADB: group size invalid for relays=" +
                                  std::to_string(spec.relays));
        continue;
      }
      detail::append_cmax_rows(spec, scheme, spec.relays, group_size, db_to_linear(snr_db),
                               "snr_db", snr_db, result);
    }
  }
  return result;
}

// Maximum ADB throughput for each group split m at a fixed budget.
inline SweepResult run_grouping_sweep(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  const double snr = db_to_linear(spec.snr_db);
  for (Protocol scheme : spec.schemes) {
    if (scheme != Protocol::adb)
      result.warnings.push_back(std::string("grouping sweep is ADB-only; skipped ") +
                                to_string(scheme));
  }
  for (double value : spec.grid) {
    const int m = static_cast<int>(value);
    if (m < 1 || m > spec.relays - 1) {
      result.warnings.push_back("skipped m=" + std::to_string(m) +
                                ": outside [1, relays-1]");
      continue;
    }
    detail::append_cmax_rows(spec, Protocol::adb, spec.relays, m, snr, "m",
                             static_cast<double>(m), result);
  }
  return result;
}

// Maximum throughput per scheme as the relay count varies. ADB defaults to
// the symmetric split m = L/2 and skips odd L unless a group size is given.
inline SweepResult run_relay_count_sweep(const ExperimentSpec& spec) {
  spec.validate();
  SweepResult result;
  const double snr = db_to_linear(spec.snr_db);
  for (double value : spec.grid) {
    const int relays = static_cast<int>(value);
    if (relays < 1) {
      result.warnings.push_back("skipped L=" + std::to_string(relays) + ": must be >= 1");
      continue;
    }
    for (Protocol scheme : spec.schemes) {
      int group_size = 0;
      if (scheme == Protocol::adb) {
        if (spec.group_size > 0) {
          group_size = spec.group_size;
        } else if (relays % 2 == 0) {
          group_size = relays / 2;
        } else {
          result.warnings.push_back("skipped ADB at L=" + std::to_string(relays) +
                                    ": odd relay count needs an explicit group size");
          continue;
        }
        if (group_size < 1 || group_size > relays - 1) {
          result.warnings.push_back("skipped ADB at L=" + std::to_string(relays) +
                                    ": group size outside [1, L-1]");
          continue;
        }
      }
      if (scheme == Protocol::sfd_mmrs && relays < 2) {
        result.warnings.push_back("skipped SFD-MMRS at L=1: needs two relays");
        continue;
      }
      detail::append_cmax_rows(spec, scheme, relays, group_size, snr, "L",
                               static_cast<double>(relays), result);
    }
  }
  return result;
}

// A single ratio point; same row layout as the ratio sweep.
inline SweepResult run_single_point(const ExperimentSpec& spec) {
  ExperimentSpec point = spec;
  point.kind = SweepKind::ratio_sweep;
  return run_ratio_sweep(point);
}

inline SweepResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case SweepKind::ratio_sweep: return run_ratio_sweep(spec);
    case SweepKind::snr_sweep: return run_snr_sweep(spec);
    case SweepKind::grouping_sweep: return run_grouping_sweep(spec);
    case SweepKind::relay_count_sweep: return run_relay_count_sweep(spec);
    case SweepKind::single_point: return run_single_point(spec);
  }
  throw ConfigError("run_experiment: unknown sweep kind");
}

}  // namespace relaysim
