// SPDX-License-Identifier: Apache-2.0
//
// riscf — RIS-assisted cell-free MIMO downlink simulator
// Copyright (C) 2026 riscf contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "riscf/units.hpp"

namespace riscf {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSI imperfection model: per-entry Gaussian error with variance
/// delta * |h|^2, split into a cascaded-link ratio (AP-RIS, RIS-UE) and a
/// direct-link ratio. los_only keeps only the LoS parts of the cascaded
/// links instead of adding error.
struct CsiErrorSpec {
  double delta_r = 0.0;
  double delta_d = 0.0;
  bool los_only = false;
};

/// Every scalar parameter of a simulation run. Defaults reproduce the
/// reference setup (4 APs with 4 antennas on a 300 m square, 4 RISs with
/// 10x10 elements on a 200 m ring, 6 UEs with 2 antennas, 23 dBm APs,
/// -100 dBm noise).
struct SystemConfig {
  // node and antenna counts
  int num_aps = 4;
  int num_ues = 6;
  int num_ris = 4;
  int ap_antennas = 4;  // N_t
  int ue_antennas = 2;  // N_r
  int ris_grid_h = 10;  // N = ris_grid_h * ris_grid_v
  int ris_grid_v = 10;
  int streams = 0; // N_s per UE; 0 = auto (equals ue_antennas)

  // power, in dBm at the interface, linear mW internally
  double max_power_dbm = 23.0; // per AP
  double noise_dbm = -100.0;

  // per-UE rate weights; empty = all ones
  std::vector<double> weights;

  // matching game
  int quota_ue_per_ris = 3;  // U_match
  int quota_ris_per_ue = 2;  // R_match
  double rejection_ratio = 0.05;

  // large-scale propagation
  double alpha_au = 4.0;
  double alpha_ar = 2.2;
  double alpha_ru = 2.2;
  double pl_ref_db = 32.4;
  double carrier_ghz = 3.5;

  // Rician factors per link family
  double beta_ar = 3.0;
  double beta_ru = 3.0;
  double beta_au = 0.0; // pure Rayleigh on the direct link

  // geometry (meters)
  double ap_square_m = 300.0;
  double ris_diameter_m = 200.0;
  double ue_square_m = 100.0;
  double ap_height_m = 10.0;
  double ris_height_m = 6.0;
  double ue_height_m = 1.5;
  bool ris_on_ring = true; // false: uniform inside the disk

  // algorithm controls
  double bisection_tol = 1e-4;  // relative mu-interval width
  double dual_tol = 1e-4;       // relative per-AP mu change across sweeps
  double mm_tol = 1e-3;         // relative objective change
  int mm_max_iter = 50;
  int bd_max_sweeps = 50;
  int bisection_max_iter = 200;
  double mu_init = 5.0;
  double mu_floor = 1e-10; // applied inside matrix inversions only
  bool phase_init_random = false;
  bool weighted_aggregate = false;  // carry rate weights into the per-RIS
                                    // aggregated phase objective
  bool printed_rejection_rule = false; // test-only inverted threshold rule

  // CSI imperfection used when designing (never when scoring)
  CsiErrorSpec csi;

  std::uint64_t rng_seed = 1;

  int ris_elements() const { return ris_grid_h * ris_grid_v; }
  int total_tx() const { return num_aps * ap_antennas; }
  int num_streams() const { return streams > 0 ? streams : ue_antennas; }
  double max_power_mw() const { return dbm_to_mw(max_power_dbm); }
  double noise_mw() const { return dbm_to_mw(noise_dbm); }
  double weight(int k) const {
    return weights.empty() ? 1.0 : weights.at(static_cast<size_t>(k));
  }
};

/// Sets the RIS element count, deriving a grid: 10 x N/10 when divisible
/// by 10, otherwise a square grid when N is a perfect square, else 1 x N.
inline void set_ris_elements(SystemConfig& cfg, int n) {
  if (n >= 10 && n % 10 == 0) {
    cfg.ris_grid_h = 10;
    cfg.ris_grid_v = n / 10;
    return;
  }
  const int root = static_cast<int>(std::lround(std::sqrt(double(n))));
  if (root > 0 && root * root == n) {
    cfg.ris_grid_h = root;
    cfg.ris_grid_v = root;
    return;
  }
  cfg.ris_grid_h = 1;
  cfg.ris_grid_v = n;
}

namespace detail {

struct ConfigKey {
  std::string section;
  std::string key;
  std::function<void(SystemConfig&, const std::string&)> set;
  std::function<std::string(const SystemConfig&)> get;
};

inline int parse_int(const std::string& v) {
  size_t pos = 0;
  const int out = std::stoi(v, &pos);
  if (pos != v.size()) throw ConfigError("not an integer: '" + v + "'");
  return out;
}

inline double parse_real(const std::string& v) {
  size_t pos = 0;
  const double out = std::stod(v, &pos);
  if (pos != v.size()) throw ConfigError("not a number: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

inline std::uint64_t parse_u64(const std::string& v) {
  size_t pos = 0;
  const unsigned long long out = std::stoull(v, &pos);
  if (pos != v.size()) throw ConfigError("not an unsigned integer: '" + v + "'");
  return static_cast<std::uint64_t>(out);
}

inline std::vector<double> parse_real_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  return out;
}

inline std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string fmt_real_list(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_real(v[i]);
  }
  return out;
}

#define RISCF_KEY_INT(sec, name, member)                                     \
  {sec, name,                                                                \
   [](SystemConfig& c, const std::string& v) { c.member = parse_int(v); },   \
   [](const SystemConfig& c) { return std::to_string(c.member); }}
#define RISCF_KEY_REAL(sec, name, member)                                    \
  {sec, name,                                                                \
   [](SystemConfig& c, const std::string& v) { c.member = parse_real(v); },  \
   [](const SystemConfig& c) { return fmt_real(c.member); }}
#define RISCF_KEY_BOOL(sec, name, member)                                    \
  {sec, name,                                                                \
   [](SystemConfig& c, const std::string& v) { c.member = parse_bool(v); },  \
   [](const SystemConfig& c) { return c.member ? std::string("true")         \
                                               : std::string("false"); }}

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      RISCF_KEY_INT("system", "num_aps", num_aps),
      RISCF_KEY_INT("system", "num_ues", num_ues),
      RISCF_KEY_INT("system", "num_ris", num_ris),
      RISCF_KEY_INT("system", "ap_antennas", ap_antennas),
      RISCF_KEY_INT("system", "ue_antennas", ue_antennas),
      {"system", "ris_elements",
       [](SystemConfig& c, const std::string& v) {
         set_ris_elements(c, parse_int(v));
       },
       [](const SystemConfig& c) { return std::to_string(c.ris_elements()); }},
      RISCF_KEY_INT("system", "ris_grid_h", ris_grid_h),
      RISCF_KEY_INT("system", "ris_grid_v", ris_grid_v),
      RISCF_KEY_INT("system", "streams", streams),
      RISCF_KEY_REAL("power", "max_power_dbm", max_power_dbm),
      RISCF_KEY_REAL("power", "noise_dbm", noise_dbm),
      {"power", "weights",
       [](SystemConfig& c, const std::string& v) {
         c.weights = parse_real_list(v);
       },
       [](const SystemConfig& c) {
         return c.weights.empty() ? std::string("1") : fmt_real_list(c.weights);
       }},
      RISCF_KEY_INT("matching", "quota_ue_per_ris", quota_ue_per_ris),
      RISCF_KEY_INT("matching", "quota_ris_per_ue", quota_ris_per_ue),
      RISCF_KEY_REAL("matching", "rejection_ratio", rejection_ratio),
      RISCF_KEY_REAL("pathloss", "alpha_au", alpha_au),
      RISCF_KEY_REAL("pathloss", "alpha_ar", alpha_ar),
      RISCF_KEY_REAL("pathloss", "alpha_ru", alpha_ru),
      RISCF_KEY_REAL("pathloss", "pl_ref_db", pl_ref_db),
      RISCF_KEY_REAL("pathloss", "carrier_ghz", carrier_ghz),
      RISCF_KEY_REAL("rician", "beta_ar", beta_ar),
      RISCF_KEY_REAL("rician", "beta_ru", beta_ru),
      RISCF_KEY_REAL("rician", "beta_au", beta_au),
      RISCF_KEY_REAL("geometry", "ap_square_m", ap_square_m),
      RISCF_KEY_REAL("geometry", "ris_diameter_m", ris_diameter_m),
      RISCF_KEY_REAL("geometry", "ue_square_m", ue_square_m),
      RISCF_KEY_REAL("geometry", "ap_height_m", ap_height_m),
      RISCF_KEY_REAL("geometry", "ris_height_m", ris_height_m),
      RISCF_KEY_REAL("geometry", "ue_height_m", ue_height_m),
      RISCF_KEY_BOOL("geometry", "ris_on_ring", ris_on_ring),
      RISCF_KEY_REAL("algorithm", "bisection_tol", bisection_tol),
      RISCF_KEY_REAL("algorithm", "dual_tol", dual_tol),
      RISCF_KEY_REAL("algorithm", "mm_tol", mm_tol),
      RISCF_KEY_INT("algorithm", "mm_max_iter", mm_max_iter),
      RISCF_KEY_INT("algorithm", "bd_max_sweeps", bd_max_sweeps),
      RISCF_KEY_INT("algorithm", "bisection_max_iter", bisection_max_iter),
      RISCF_KEY_REAL("algorithm", "mu_init", mu_init),
      RISCF_KEY_REAL("algorithm", "mu_floor", mu_floor),
      RISCF_KEY_BOOL("algorithm", "phase_init_random", phase_init_random),
      RISCF_KEY_BOOL("algorithm", "weighted_aggregate", weighted_aggregate),
      RISCF_KEY_BOOL("algorithm", "printed_rejection_rule",
                     printed_rejection_rule),
      {"csi", "delta_r",
       [](SystemConfig& c, const std::string& v) {
         c.csi.delta_r = parse_real(v);
       },
       [](const SystemConfig& c) { return fmt_real(c.csi.delta_r); }},
      {"csi", "delta_d",
       [](SystemConfig& c, const std::string& v) {
         c.csi.delta_d = parse_real(v);
       },
       [](const SystemConfig& c) { return fmt_real(c.csi.delta_d); }},
      {"csi", "los_only",
       [](SystemConfig& c, const std::string& v) {
         c.csi.los_only = parse_bool(v);
       },
       [](const SystemConfig& c) {
         return c.csi.los_only ? std::string("true") : std::string("false");
       }},
      {"run", "rng_seed",
       [](SystemConfig& c, const std::string& v) { c.rng_seed = parse_u64(v); },
       [](const SystemConfig& c) { return std::to_string(c.rng_seed); }},
  };
  return keys;
}

#undef RISCF_KEY_INT
#undef RISCF_KEY_REAL
#undef RISCF_KEY_BOOL

inline const ConfigKey* find_key(const std::string& name) {
  const auto dot = name.find('.');
  const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
  const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
  for (const auto& entry : config_keys()) {
    if (entry.key == key && (section.empty() || entry.section == section))
      return &entry;
  }
  return nullptr;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace detail

/// Applies one "key=value" or "section.key=value" override.
inline void apply_override(SystemConfig& cfg, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value, got '" + spec + "'");
  const std::string key = detail::trim(spec.substr(0, eq));
  const std::string value = detail::trim(spec.substr(eq + 1));
  const auto* entry = detail::find_key(key);
  if (!entry) throw ConfigError("unknown config key '" + key + "'");
  try {
    entry->set(cfg, value);
  } catch (const std::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

/// Parses a flat key = value file with [section] headers. '#' and ';'
/// start comments. Unknown keys are errors.
inline SystemConfig parse_config(std::istream& in,
                                 SystemConfig base = SystemConfig{}) {
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const std::string qualified = section.empty() ? key : section + "." + key;
    const auto* entry = detail::find_key(qualified);
    if (!entry)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unknown config key '" + qualified + "'");
    try {
      entry->set(base, value);
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Resolved configuration as deterministic "section.key = value" lines.
inline std::vector<std::string> config_echo(const SystemConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& entry : detail::config_keys())
    out.push_back(entry.section + "." + entry.key + " = " + entry.get(cfg));
  return out;
}

/// Returns every violated invariant; empty means the config is usable.
inline std::vector<std::string> validate_config(const SystemConfig& c) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(msg); };

  auto positive = [&](int v, const char* name) {
    if (v < 1) fail(std::string(name) + " must be >= 1, got " + std::to_string(v));
  };
  positive(c.num_aps, "num_aps");
  positive(c.num_ues, "num_ues");
  positive(c.num_ris, "num_ris");
  positive(c.ap_antennas, "ap_antennas");
  positive(c.ue_antennas, "ue_antennas");
  positive(c.ris_grid_h, "ris_grid_h");
  positive(c.ris_grid_v, "ris_grid_v");
  positive(c.quota_ue_per_ris, "quota_ue_per_ris");
  positive(c.quota_ris_per_ue, "quota_ris_per_ue");

  if (c.num_ues * c.ue_antennas > c.num_aps * c.ap_antennas)
    fail("K*N_r > B*N_t: num_ues*ue_antennas = " +
         std::to_string(c.num_ues * c.ue_antennas) +
         " exceeds num_aps*ap_antennas = " +
         std::to_string(c.num_aps * c.ap_antennas));
  if (c.streams < 0)
    fail("streams must be >= 0 (0 = auto), got " + std::to_string(c.streams));
  if (c.num_streams() > c.ue_antennas)
    fail("N_s > N_r: streams = " + std::to_string(c.num_streams()) +
         " exceeds ue_antennas = " + std::to_string(c.ue_antennas));
  if (!(c.rejection_ratio > 0.0 && c.rejection_ratio < 1.0))
    fail("rejection_ratio out of (0,1): " +
         detail::fmt_real(c.rejection_ratio));
  if (!c.weights.empty() &&
      c.weights.size() != static_cast<size_t>(c.num_ues))
    fail("weights length " + std::to_string(c.weights.size()) +
         " != num_ues " + std::to_string(c.num_ues));
  for (size_t k = 0; k < c.weights.size(); ++k)
    if (!(c.weights[k] > 0.0))
      fail("weights[" + std::to_string(k) + "] must be > 0, got " +
           detail::fmt_real(c.weights[k]));

  auto positive_real = [&](double v, const char* name) {
    if (!(v > 0.0))
      fail(std::string(name) + " must be > 0, got " + detail::fmt_real(v));
  };
  positive_real(c.bisection_tol, "bisection_tol");
  positive_real(c.dual_tol, "dual_tol");
  positive_real(c.mm_tol, "mm_tol");
  positive_real(c.mu_floor, "mu_floor");
  positive_real(c.carrier_ghz, "carrier_ghz");
  positive_real(c.ap_square_m, "ap_square_m");
  positive_real(c.ris_diameter_m, "ris_diameter_m");
  positive_real(c.ue_square_m, "ue_square_m");
  if (c.mm_max_iter < 1) fail("mm_max_iter must be >= 1");
  if (c.bd_max_sweeps < 1) fail("bd_max_sweeps must be >= 1");
  if (c.bisection_max_iter < 1) fail("bisection_max_iter must be >= 1");
  if (c.mu_init < 0.0) fail("mu_init must be >= 0");
  if (c.beta_ar < 0.0 || c.beta_ru < 0.0 || c.beta_au < 0.0)
    fail("Rician factors must be >= 0");
  if (c.ap_height_m < 0.0 || c.ris_height_m < 0.0 || c.ue_height_m < 0.0)
    fail("heights must be >= 0");
  if (c.csi.delta_r < 0.0)
    fail("csi.delta_r must be >= 0, got " + detail::fmt_real(c.csi.delta_r));
  if (c.csi.delta_d < 0.0)
    fail("csi.delta_d must be >= 0, got " + detail::fmt_real(c.csi.delta_d));
  return errors;
}

/// Throwing variant for internal call sites that require a valid config.
inline void require_valid(const SystemConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (errors.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigError(msg);
}

} // namespace riscf
