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
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaysim/errors.hpp"
#include "relaysim/sweeps.hpp"

namespace relaysim {

// Command-line values that take precedence over the config file.
struct SpecOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> slots;
  std::optional<std::uint64_t> search_slots;
  std::optional<std::uint64_t> switch_period;
  std::optional<int> workers;
  std::optional<int> relays;
  std::optional<int> group_size;
  std::optional<int> opt_grid_points;
  std::optional<double> snr_db;
  std::optional<double> sigma_g2;
  std::optional<double> sigma_h2;
  std::optional<double> ratio;
  std::optional<std::vector<std::string>> schemes;
  std::optional<bool> analytic_only;
  std::optional<bool> json_lines;
};

namespace detail {

inline const std::set<std::string>& allowed_config_keys() {
  static const std::set<std::string> keys = {
      "schemes",     "snr_db",       "snr_grid_db",   "ratio_grid",  "m_grid",
      "relay_grid",  "relays",       "group_size",    "sigma_g2",    "sigma_h2",
      "slots",       "search_slots", "seed",          "workers",     "switch_period",
      "out",         "analytic_only", "json_lines",   "opt_grid_points", "ratio",
  };
  return keys;
}

template <class T>
T get_checked(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key \"" + key + "\" has the wrong type", key);
  }
}

inline std::vector<Protocol> parse_schemes(const std::vector<std::string>& names,
                                           const std::string& key) {
  std::vector<Protocol> schemes;
  for (const auto& name : names) {
    const auto p = protocol_from_string(name);
    if (!p) throw ConfigError("unknown scheme \"" + name + "\" in \"" + key + "\"", key);
    for (Protocol existing : schemes) {
      if (existing == *p)
        throw ConfigError("duplicate scheme \"" + name + "\" in \"" + key + "\"", key);
    }
    schemes.push_back(*p);
  }
  return schemes;
}

inline std::vector<double> default_grid(SweepKind kind, const ExperimentSpec& spec) {
  std::vector<double> grid;
  switch (kind) {
    case SweepKind::ratio_sweep:
      // 21 log-spaced ratios covering p_s/p_r in [0.1, 10].
      for (int i = 0; i <= 20; ++i) grid.push_back(std::pow(10.0, -1.0 + i / 10.0));
      break;
    case SweepKind::snr_sweep:
      for (int db = 0; db <= 30; db += 5) grid.push_back(db);
      break;
    case SweepKind::grouping_sweep:
      for (int m = 1; m <= spec.relays - 1; ++m) grid.push_back(m);
      break;
    case SweepKind::relay_count_sweep:
      for (int relays = 2; relays <= 14; relays += 2) grid.push_back(relays);
      break;
    case SweepKind::single_point:
      grid.push_back(1.0);
      break;
  }
  return grid;
}

inline const char* grid_key_for(SweepKind kind) {
  switch (kind) {
    case SweepKind::ratio_sweep: return "ratio_grid";
    case SweepKind::snr_sweep: return "snr_grid_db";
    case SweepKind::grouping_sweep: return "m_grid";
    case SweepKind::relay_count_sweep: return "relay_grid";
    case SweepKind::single_point: return "ratio";
  }
  return "";
}

}  // namespace detail

// Builds an ExperimentSpec for the given sweep kind from a JSON config text
// (may be empty) merged with command-line overrides; flags win. Unknown
// keys are rejected by name.
inline ExperimentSpec load_spec(SweepKind kind, const std::string& config_text,
                                const SpecOverrides& overrides) {
  ExperimentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case SweepKind::ratio_sweep:
    case SweepKind::single_point:
    case SweepKind::relay_count_sweep:
      spec.snr_db = 10.0;
      break;
    case SweepKind::snr_sweep:
      spec.snr_db = 10.0;  // unused; the grid carries the dB values
      break;
    case SweepKind::grouping_sweep:
      spec.snr_db = 15.0;
      spec.relays = 6;
      break;
  }
  if (kind == SweepKind::grouping_sweep) {
    spec.schemes = {Protocol::adb};
  } else {
    spec.schemes = {Protocol::crs, Protocol::sfd_mmrs, Protocol::df, Protocol::adb};
  }

  double point_ratio = 1.0;
  bool have_grid = false;

  if (!config_text.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed config file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

    for (const auto& item : j.items()) {
      if (!detail::allowed_config_keys().count(item.key()))
        throw ConfigError("unknown config key \"" + item.key() + "\"", item.key());
    }

    if (j.contains("schemes"))
      spec.schemes = detail::parse_schemes(
          detail::get_checked<std::vector<std::string>>(j, "schemes"), "schemes");
    if (j.contains("snr_db")) spec.snr_db = detail::get_checked<double>(j, "snr_db");
    if (j.contains("relays")) spec.relays = detail::get_checked<int>(j, "relays");
    if (j.contains("group_size")) spec.group_size = detail::get_checked<int>(j, "group_size");
    if (j.contains("sigma_g2")) spec.sigma_g2 = detail::get_checked<double>(j, "sigma_g2");
    if (j.contains("sigma_h2")) spec.sigma_h2 = detail::get_checked<double>(j, "sigma_h2");
    if (j.contains("slots")) spec.n_slots = detail::get_checked<std::uint64_t>(j, "slots");
    if (j.contains("search_slots"))
      spec.search_slots = detail::get_checked<std::uint64_t>(j, "search_slots");
    if (j.contains("seed")) spec.seed = detail::get_checked<std::uint64_t>(j, "seed");
    if (j.contains("workers")) spec.workers = detail::get_checked<int>(j, "workers");
    if (j.contains("switch_period"))
      spec.switch_period = detail::get_checked<std::uint64_t>(j, "switch_period");
    if (j.contains("out")) spec.out = detail::get_checked<std::string>(j, "out");
    if (j.contains("analytic_only"))
      spec.analytic_only = detail::get_checked<bool>(j, "analytic_only");
    if (j.contains("json_lines")) spec.json_lines = detail::get_checked<bool>(j, "json_lines");
    if (j.contains("opt_grid_points"))
      spec.opt_grid_points = detail::get_checked<int>(j, "opt_grid_points");
    if (j.contains("ratio")) point_ratio = detail::get_checked<double>(j, "ratio");

    const char* grid_key = detail::grid_key_for(kind);
    if (kind != SweepKind::single_point && j.contains(grid_key)) {
      spec.grid = detail::get_checked<std::vector<double>>(j, grid_key);
      have_grid = true;
    }
  }

  if (overrides.schemes) spec.schemes = detail::parse_schemes(*overrides.schemes, "schemes");
  if (overrides.snr_db) spec.snr_db = *overrides.snr_db;
  if (overrides.relays) spec.relays = *overrides.relays;
  if (overrides.group_size) spec.group_size = *overrides.group_size;
  if (overrides.sigma_g2) spec.sigma_g2 = *overrides.sigma_g2;
  if (overrides.sigma_h2) spec.sigma_h2 = *overrides.sigma_h2;
  if (overrides.slots) spec.n_slots = *overrides.slots;
  if (overrides.search_slots) spec.search_slots = *overrides.search_slots;
  if (overrides.seed) spec.seed = *overrides.seed;
  if (overrides.workers) spec.workers = *overrides.workers;
  if (overrides.switch_period) spec.switch_period = *overrides.switch_period;
  if (overrides.out) spec.out = *overrides.out;
  if (overrides.analytic_only) spec.analytic_only = *overrides.analytic_only;
  if (overrides.json_lines) spec.json_lines = *overrides.json_lines;
  if (overrides.opt_grid_points) spec.opt_grid_points = *overrides.opt_grid_points;
  if (overrides.ratio) point_ratio = *overrides.ratio;

  if (kind == SweepKind::single_point) {
    spec.grid = {point_ratio};
  } else if (!have_grid) {
    spec.grid = detail::default_grid(kind, spec);
  }

  spec.validate();
  return spec;
}

// Same, reading the config from a file. An empty path means no file.
inline ExperimentSpec load_spec_file(SweepKind kind, const std::string& path,
                                     const SpecOverrides& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    // A present-but-empty file is treated as an empty object.
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) text.clear();
  }
  return load_spec(kind, text, overrides);
}

}  // namespace relaysim
