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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riscf/config.hpp"
#include "riscf/evaluate.hpp"
#include "riscf/io.hpp"

namespace riscf {
namespace cli {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string outdir;
  int jobs = 0; // 0 = all cores
};

inline void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "config file path");
  cmd->add_option("--override", opts.overrides,
                  "config override key=value (repeatable)");
  cmd->add_option("--seed", opts.seed, "master RNG seed")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("-o,--out", opts.outdir,
                  "output directory (default $RISCF_OUT_DIR or '.')");
  cmd->add_option("-j,--jobs", opts.jobs,
                  "worker threads (0 = all cores); output is identical "
                  "for any value");
}

inline SystemConfig resolve_config(const CommonOptions& opts) {
  SystemConfig cfg = opts.config_path.empty()
                         ? SystemConfig{}
                         : load_config_file(opts.config_path);
  for (const auto& spec : opts.overrides) apply_override(cfg, spec);
  if (opts.seed_given) cfg.rng_seed = opts.seed;
  return cfg;
}

inline std::filesystem::path resolve_outdir(const CommonOptions& opts) {
  std::string dir = opts.outdir;
  if (dir.empty()) {
    const char* env = std::getenv("RISCF_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

/// Parses an inclusive start:step:stop grid.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::stringstream ss(spec);
  std::string part;
  std::vector<double> parts;
  while (std::getline(ss, part, ':'))
    parts.push_back(detail::parse_real(part));
  if (parts.size() != 3)
    throw ConfigError("grid must be start:step:stop, got '" + spec + "'");
  const double start = parts[0], step = parts[1], stop = parts[2];
  if (step == 0.0) throw ConfigError("grid step must be nonzero");
  std::vector<double> grid;
  const double slack = 1e-9 * std::abs(step);
  for (double v = start;
       step > 0 ? v <= stop + slack : v >= stop - slack; v += step)
    grid.push_back(v);
  if (grid.empty()) throw ConfigError("grid '" + spec + "' is empty");
  return grid;
}

inline std::vector<SchemeSpec> parse_scheme_list(const std::string& list) {
  std::vector<SchemeSpec> schemes;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ','))
    if (!name.empty()) schemes.push_back(parse_scheme(name));
  if (schemes.empty()) throw ConfigError("empty scheme list");
  return schemes;
}

inline int validate_or_report(const SystemConfig& cfg) {
  const auto errors = validate_config(cfg);
  if (errors.empty()) return 0;
  for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
  return 1;
}

/// Front end entry point. Exit codes: 0 success, 1 configuration or
/// validation error, 2 runtime failure.
inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"riscf — RIS-assisted cell-free MIMO downlink simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_scheme_name = "proposed";
  bool dump_traces = false;
  auto* run_cmd = app.add_subcommand(
      "run", "single drop of one scheme; prints a JSON result");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--scheme", run_scheme_name, "scheme to run");
  run_cmd->add_flag("--dump-traces", dump_traces,
                    "write MM traces and dual-loop diagnostics CSV");

  CommonOptions sweep_opts;
  std::string sweep_axis, sweep_grid;
  std::string sweep_schemes = "proposed";
  int sweep_drops = 200;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Monte-Carlo sweep over one parameter; writes sweep.csv");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", sweep_axis,
                        "power_dbm | ris_elements | ap_antennas | "
                        "ris_diameter | csi_delta_r | csi_delta_d | "
                        "ue0_weight")
      ->required();
  sweep_cmd->add_option("--grid", sweep_grid, "start:step:stop (inclusive)")
      ->required();
  sweep_cmd->add_option("--schemes", sweep_schemes,
                        "comma-separated scheme list");
  sweep_cmd->add_option("--drops", sweep_drops, "channel drops per point");

  CommonOptions cdf_opts;
  std::string cdf_schemes = "proposed";
  int cdf_drops = 200;
  auto* cdf_cmd = app.add_subcommand(
      "cdf", "per-drop WSR samples as an empirical CDF; writes cdf.csv");
  add_common(cdf_cmd, cdf_opts);
  cdf_cmd->add_option("--schemes", cdf_schemes, "comma-separated scheme list");
  cdf_cmd->add_option("--drops", cdf_drops, "channel drops");

  CommonOptions validate_opts;
  auto* validate_cmd =
      app.add_subcommand("validate", "check the resolved config");
  add_common(validate_cmd, validate_opts);

  CommonOptions dump_opts;
  auto* dump_cmd = app.add_subcommand(
      "dump-channels", "write one drop's channels as channels.json");
  add_common(dump_cmd, dump_opts);

  std::vector<const char*> argv;
  argv.push_back("riscf");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(validate_cmd)) {
      const SystemConfig cfg = resolve_config(validate_opts);
      const int rc = validate_or_report(cfg);
      if (rc == 0) std::cout << "ok\n";
      return rc;
    }

    if (app.got_subcommand(run_cmd)) {
      const SystemConfig cfg = resolve_config(run_opts);
      if (int rc = validate_or_report(cfg)) return rc;
      const SchemeSpec scheme = parse_scheme(run_scheme_name);
      RunArtifacts artifacts;
      const RunResult result =
          run_scheme(scheme, cfg, cfg.rng_seed, &artifacts);
      const auto j = run_result_to_json(result, cfg);
      std::cout << j.dump(2) << "\n";
      if (!run_opts.outdir.empty() || dump_traces) {
        const auto dir = resolve_outdir(run_opts);
        write_file((dir / "run.json").string(), j.dump(2) + "\n");
        std::ostringstream assoc;
        write_association_csv(assoc, result.association);
        write_file((dir / "association.csv").string(), assoc.str());
        if (dump_traces) {
          std::ostringstream mm;
          write_mm_trace_csv(mm, artifacts.aggregate_mm, cfg, result.seed);
          write_file((dir / "mm_trace.csv").string(), mm.str());
          std::ostringstream bd;
          write_bd_diagnostics_csv(bd, artifacts.precoders, cfg, result.seed);
          write_file((dir / "bd_diagnostics.csv").string(), bd.str());
        }
      }
      return 0;
    }

    if (app.got_subcommand(sweep_cmd)) {
      const SystemConfig cfg = resolve_config(sweep_opts);
      if (int rc = validate_or_report(cfg)) return rc;
      const auto schemes = parse_scheme_list(sweep_schemes);
      const auto grid = parse_grid(sweep_grid);
      const auto points = monte_carlo(cfg, schemes, sweep_drops, sweep_axis,
                                      grid, sweep_opts.jobs);
      const auto dir = resolve_outdir(sweep_opts);
      std::ostringstream csv;
      write_sweep_csv(csv, points, cfg);
      const auto path = dir / "sweep.csv";
      write_file(path.string(), csv.str());
      std::cout << path.string() << "\n";
      return 0;
    }

    if (app.got_subcommand(cdf_cmd)) {
      const SystemConfig cfg = resolve_config(cdf_opts);
      if (int rc = validate_or_report(cfg)) return rc;
      const auto schemes = parse_scheme_list(cdf_schemes);
      const auto points = monte_carlo(cfg, schemes, cdf_drops, std::nullopt,
                                      {}, cdf_opts.jobs);
      const auto dir = resolve_outdir(cdf_opts);
      std::ostringstream csv;
      write_cdf_csv(csv, points, cfg);
      const auto path = dir / "cdf.csv";
      write_file(path.string(), csv.str());
      std::cout << path.string() << "\n";
      return 0;
    }

    if (app.got_subcommand(dump_cmd)) {
      const SystemConfig cfg = resolve_config(dump_opts);
      if (int rc = validate_or_report(cfg)) return rc;
      Rng topo_rng = Rng::derived(cfg.rng_seed, {stream::topology});
      const Topology topo = generate_topology(cfg, topo_rng);
      Rng chan_rng = Rng::derived(cfg.rng_seed, {stream::channels});
      const ChannelSet channels = generate_channels(topo, cfg, chan_rng);
      const auto dir = resolve_outdir(dump_opts);
      const auto path = dir / "channels.json";
      write_file(path.string(),
                 channels_to_json(channels, cfg, cfg.rng_seed).dump() + "\n");
      std::cout << path.string() << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace cli
} // namespace riscf
