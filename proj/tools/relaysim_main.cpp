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

// Command-line front end. Subcommands reproduce the standard experiment
// sweeps as CSV (or JSON lines):
//   fig3  throughput vs p_s/p_r ratio, all schemes + analytic ADB
//   fig4  optimized throughput vs total-power SNR
//   fig5  optimized ADB throughput vs group split m
//   fig6  optimized throughput vs relay count
//   point single ratio point
//   selftest  runs the numerical validation suite
//
// Exit codes: 0 ok, 2 config error, 3 numerical-domain error,
// 4 selftest failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "relaysim/config.hpp"
#include "relaysim/relaysim.hpp"
#include "support/acceptance_suite.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> slots;
  std::optional<std::uint64_t> search_slots;
  std::optional<int> workers;
  std::optional<double> snr_db;
  std::optional<int> relays;
  std::optional<int> group_size;
  std::optional<std::string> schemes;
  std::optional<double> ratio;
  bool analytic_only = false;
  bool json_lines = false;
};

std::vector<std::string> split_comma(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; flags override it");
  cmd->add_option("--out", flags.out, "output CSV path (default: stdout)");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--slots", flags.slots, "slots per simulated point");
  cmd->add_option("--search-slots", flags.search_slots,
                  "slots per evaluation during power optimization");
  cmd->add_option("--workers", flags.workers, "worker threads (results are identical)");
  cmd->add_option("--snr-db", flags.snr_db, "total power budget in dB");
  cmd->add_option("--relays", flags.relays, "number of relays L");
  cmd->add_option("--group-size", flags.group_size, "relays in group 1 (ADB)");
  cmd->add_option("--schemes", flags.schemes, "comma list: CRS,SFD-MMRS,DF,ADB");
  cmd->add_flag("--analytic-only", flags.analytic_only, "emit only closed-form rows");
  cmd->add_flag("--json", flags.json_lines, "emit JSON lines instead of CSV");
}

relaysim::SpecOverrides to_overrides(const CommonFlags& flags) {
  relaysim::SpecOverrides ov;
  ov.out = flags.out;
  ov.seed = flags.seed;
  ov.slots = flags.slots;
  ov.search_slots = flags.search_slots;
  ov.workers = flags.workers;
  ov.snr_db = flags.snr_db;
  ov.relays = flags.relays;
  ov.group_size = flags.group_size;
  ov.ratio = flags.ratio;
  if (flags.schemes) ov.schemes = split_comma(*flags.schemes);
  if (flags.analytic_only) ov.analytic_only = true;
  if (flags.json_lines) ov.json_lines = true;
  return ov;
}

int run_sweep(relaysim::SweepKind kind, const CommonFlags& flags) {
  const relaysim::ExperimentSpec spec =
      relaysim::load_spec_file(kind, flags.config_path, to_overrides(flags));
  const relaysim::SweepResult result = relaysim::run_experiment(spec);

  if (spec.out.empty()) {
    if (spec.json_lines) {
      relaysim::write_json_lines(result.rows, std::cout);
    } else {
      relaysim::write_csv(result.rows, std::cout);
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
  }

  std::ofstream out(spec.out, std::ios::binary);
  if (!out) throw relaysim::ConfigError("cannot open output file: " + spec.out);
  if (spec.json_lines) {
    relaysim::write_json_lines(result.rows, out);
  } else {
    relaysim::write_csv(result.rows, out);
  }
  if (!result.warnings.empty()) {
    std::ofstream log(spec.out + ".log", std::ios::binary);
    for (const auto& w : result.warnings) log << w << '\n';
  }
  return 0;
}

int run_selftest(const std::string& cli_path, bool quick, int workers) {
  relaysim::acceptance::SuiteOptions opts;
  opts.cli_path = cli_path;
  opts.workers = workers;
  if (quick) opts.scale = 0.05;
  const auto results = relaysim::acceptance::run_suite(opts, &std::cout);
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-duplex buffer-aided multi-relay throughput toolkit"};
  app.require_subcommand(1);

  CommonFlags fig3_flags, fig4_flags, fig5_flags, fig6_flags, point_flags;

  CLI::App* fig3 = app.add_subcommand("fig3", "throughput vs p_s/p_r ratio");
  add_common_flags(fig3, fig3_flags);
  CLI::App* fig4 = app.add_subcommand("fig4", "optimized throughput vs SNR budget");
  add_common_flags(fig4, fig4_flags);
  CLI::App* fig5 = app.add_subcommand("fig5", "optimized ADB throughput vs group split");
  add_common_flags(fig5, fig5_flags);
  CLI::App* fig6 = app.add_subcommand("fig6", "optimized throughput vs relay count");
  add_common_flags(fig6, fig6_flags);
  CLI::App* point = app.add_subcommand("point", "single ratio point");
  add_common_flags(point, point_flags);
  point->add_option("--ratio", point_flags.ratio, "p_s/p_r ratio of the point");

  bool quick = false;
  int selftest_workers = static_cast<int>(std::thread::hardware_concurrency());
  if (selftest_workers < 1) selftest_workers = 1;
  CLI::App* selftest = app.add_subcommand("selftest", "run the numerical validation suite");
  selftest->add_flag("--quick", quick, "reduced sample counts (smoke test)");
  selftest->add_option("--workers", selftest_workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fig3->parsed()) return run_sweep(relaysim::SweepKind::ratio_sweep, fig3_flags);
    if (fig4->parsed()) return run_sweep(relaysim::SweepKind::snr_sweep, fig4_flags);
    if (fig5->parsed()) return run_sweep(relaysim::SweepKind::grouping_sweep, fig5_flags);
    if (fig6->parsed()) return run_sweep(relaysim::SweepKind::relay_count_sweep, fig6_flags);
    if (point->parsed()) return run_sweep(relaysim::SweepKind::single_point, point_flags);
    if (selftest->parsed()) return run_selftest(argv[0], quick, selftest_workers);
  } catch (const relaysim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
