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

#include <armadillo>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riscf/association.hpp"
#include "riscf/beamforming.hpp"
#include "riscf/channel.hpp"
#include "riscf/config.hpp"
#include "riscf/parallel.hpp"
#include "riscf/phase_opt.hpp"
#include "riscf/topology.hpp"

namespace riscf {

// ---------------------------------------------------------------------------
// Rate evaluation
// ---------------------------------------------------------------------------

/// Achievable rate of UE k in bps/Hz with interference computed exactly
/// from the given precoders (never assumed zero), so the same evaluator
/// scores zero-forcing and non-zero-forcing designs fairly.
inline double user_rate(int ue, const std::vector<arma::cx_mat>& effective,
                        const std::vector<arma::cx_mat>& precoders,
                        double noise_mw) {
  const double sigma = std::sqrt(noise_mw);
  const arma::uword nr = effective.at(ue).n_rows;
  const arma::cx_mat normalized = effective[ue] / sigma;

  arma::cx_mat interference(nr, nr, arma::fill::eye);
  for (size_t i = 0; i < precoders.size(); ++i) {
    if (static_cast<int>(i) == ue) continue;
    const arma::cx_mat path = normalized * precoders[i];
    interference += path * path.t();
  }
  const arma::cx_mat signal_path = normalized * precoders[ue];
  const arma::cx_mat total = interference + signal_path * signal_path.t();

  const double log_num = arma::log_det_sympd(0.5 * (total + total.t()));
  const double log_den =
      arma::log_det_sympd(0.5 * (interference + interference.t()));
  return (log_num - log_den) / std::log(2.0);
}

inline double weighted_sum_rate(const std::vector<double>& rates,
                                const SystemConfig& cfg) {
  double wsr = 0.0;
  for (size_t k = 0; k < rates.size(); ++k)
    wsr += cfg.weight(static_cast<int>(k)) * rates[k];
  return wsr;
}

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

enum class Scheme {
  proposed,
  without_ris,
  random_phase,
  discrete_phase,
  full_association,
  direct_blocked,
};

struct SchemeSpec {
  Scheme kind = Scheme::proposed;
  int bits = 0; // discrete_phase resolution

  std::string label() const {
    switch (kind) {
      case Scheme::proposed: return "proposed";
      case Scheme::without_ris: return "without_ris";
      case Scheme::random_phase: return "random_phase";
      case Scheme::discrete_phase: return "discrete" + std::to_string(bits);
      case Scheme::full_association: return "full_association";
      case Scheme::direct_blocked: return "direct_blocked";
    }
    return "?";
  }
};

inline SchemeSpec parse_scheme(const std::string& name) {
  if (name == "proposed") return {Scheme::proposed, 0};
  if (name == "without_ris") return {Scheme::without_ris, 0};
  if (name == "random_phase") return {Scheme::random_phase, 0};
  if (name == "full_association") return {Scheme::full_association, 0};
  if (name == "direct_blocked") return {Scheme::direct_blocked, 0};
  if (name.rfind("discrete", 0) == 0 && name.size() > 8) {
    const int bits = std::stoi(name.substr(8));
    if (bits >= 1) return {Scheme::discrete_phase, bits};
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

// ---------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------

/// Outcome of one scheme on one network drop.
struct RunResult {
  double wsr = 0.0;
  std::vector<double> per_ue_rates;
  Association association;
  int mm_iterations = 0;       // largest MM iteration count in the run
  int bd_outer_iterations = 0;
  long csi_channels_acquired = 0; // RIS-UE channels per small timescale
  std::string scheme;
  std::uint64_t seed = 0;
  arma::vec ap_power_mw;
  bool bd_converged = true;
};

/// Optional collector for convergence traces and dual diagnostics.
struct RunArtifacts {
  MmAggregateReport aggregate_mm;
  PrecoderSet precoders;
  std::vector<arma::cx_mat> design_effective;
};

/// Runs one scheme on one drop: topology, true channels, estimated
/// channels, then stage one (per-pair utilities and matching, where the
/// scheme uses them), stage two (per-RIS phases, joint BD on the
/// *estimated* equivalent channels), and finally scores the design
/// against the true channels.
inline RunResult run_scheme(const SchemeSpec& spec, const SystemConfig& cfg,
                            std::uint64_t seed,
                            RunArtifacts* artifacts = nullptr) {
  const int num_ris = cfg.num_ris;
  const int num_ues = cfg.num_ues;
  const int n = cfg.ris_elements();

  Rng topo_rng = Rng::derived(seed, {stream::topology});
  const Topology topo = generate_topology(cfg, topo_rng);

  Rng chan_rng = Rng::derived(seed, {stream::channels});
  ChannelSet truth = generate_channels(topo, cfg, chan_rng);
  if (spec.kind == Scheme::direct_blocked)
    for (auto& h : truth.direct) h.zeros();

  Rng csi_rng = Rng::derived(seed, {stream::csi});
  const ChannelSet design = corrupt_csi(truth, cfg.csi, csi_rng);

  Association assoc = Association::none(num_ris, num_ues);
  PhaseConfig phases = PhaseConfig::all_ones(num_ris, n);
  if (cfg.phase_init_random) {
    Rng init_rng = Rng::derived(seed, {stream::phase_init});
    phases = PhaseConfig::random(num_ris, n, init_rng);
  }

  int mm_iterations = 0;
  MmAggregateReport agg_report;
  switch (spec.kind) {
    case Scheme::without_ris:
      break; // empty association removes every reflected term
    case Scheme::full_association:
      assoc = Association::full(num_ris, num_ues);
      phases = mm_phase_aggregate(design, assoc, cfg, phases, &agg_report);
      mm_iterations = agg_report.iterations_max;
      break;
    case Scheme::random_phase: {
      const auto prefs = compute_utilities(design, cfg, seed);
      assoc = match(prefs, cfg);
      Rng phase_rng = Rng::derived(seed, {stream::random_phase});
      phases = PhaseConfig::random(num_ris, n, phase_rng);
      mm_iterations = prefs.mm_iterations_max;
      break;
    }
    case Scheme::proposed:
    case Scheme::discrete_phase:
    case Scheme::direct_blocked: {
      const auto prefs = compute_utilities(design, cfg, seed);
      assoc = match(prefs, cfg);
      phases = mm_phase_aggregate(design, assoc, cfg, phases, &agg_report);
      mm_iterations =
          std::max(prefs.mm_iterations_max, agg_report.iterations_max);
      if (spec.kind == Scheme::discrete_phase)
        phases = quantize_phases(phases, spec.bits);
      break;
    }
  }

  const auto design_effective = effective_channels(design, assoc, phases);
  const PrecoderSet precoders = joint_bd(design_effective, cfg);
  const auto true_effective = effective_channels(truth, assoc, phases);

  RunResult result;
  result.per_ue_rates.resize(num_ues);
  for (int k = 0; k < num_ues; ++k)
    result.per_ue_rates[k] =
        user_rate(k, true_effective, precoders.F, cfg.noise_mw());
  result.wsr = weighted_sum_rate(result.per_ue_rates, cfg);
  result.association = assoc;
  result.mm_iterations = mm_iterations;
  result.bd_outer_iterations = precoders.outer_iterations;
  result.bd_converged = precoders.converged;
  result.ap_power_mw = precoders.ap_power_mw;
  result.scheme = spec.label();
  result.seed = seed;
  switch (spec.kind) {
    case Scheme::without_ris:
      result.csi_channels_acquired = 0;
      break;
    case Scheme::full_association:
      result.csi_channels_acquired =
          static_cast<long>(num_ris) * num_ues;
      break;
    default:
      result.csi_channels_acquired = assoc.matched_pairs();
      break;
  }
  if (artifacts) {
    artifacts->aggregate_mm = agg_report;
    artifacts->precoders = precoders;
    artifacts->design_effective = design_effective;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monte-Carlo aggregation and sweeps
// ---------------------------------------------------------------------------

inline std::uint64_t drop_seed(std::uint64_t base, int drop) {
  return mix_seed(base, {stream::drop, static_cast<std::uint64_t>(drop)});
}

/// Rewrites one swept parameter. Axes: power_dbm, ris_elements,
/// ap_antennas (total across APs), ris_diameter, csi_delta_r,
/// csi_delta_d, ue0_weight.
inline void apply_sweep_axis(SystemConfig& cfg, const std::string& axis,
                             double value) {
  if (axis == "power_dbm") {
    cfg.max_power_dbm = value;
  } else if (axis == "ris_elements") {
    set_ris_elements(cfg, static_cast<int>(std::lround(value)));
  } else if (axis == "ap_antennas") {
    const long total = std::lround(value);
    if (total % cfg.num_aps != 0)
      throw std::invalid_argument(
          "ap_antennas sweep value must be divisible by num_aps");
    cfg.ap_antennas = static_cast<int>(total / cfg.num_aps);
  } else if (axis == "ris_diameter") {
    cfg.ris_diameter_m = value;
  } else if (axis == "csi_delta_r") {
    cfg.csi.delta_r = value;
  } else if (axis == "csi_delta_d") {
    cfg.csi.delta_d = value;
  } else if (axis == "ue0_weight") {
    if (cfg.weights.empty())
      cfg.weights.assign(static_cast<size_t>(cfg.num_ues), 1.0);
    cfg.weights.at(0) = value;
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
}

/// All drops of one (sweep point, scheme) cell.
struct MonteCarloPoint {
  double sweep_value = 0.0;
  SchemeSpec scheme;
  std::vector<RunResult> drops;

  double mean_wsr() const {
    double sum = 0.0;
    for (const auto& d : drops) sum += d.wsr;
    return sum / static_cast<double>(drops.size());
  }

  double stderr_wsr() const {
    if (drops.size() < 2) return 0.0;
    const double mean = mean_wsr();
    double ss = 0.0;
    for (const auto& d : drops) ss += (d.wsr - mean) * (d.wsr - mean);
    return std::sqrt(ss / (static_cast<double>(drops.size()) - 1.0) /
                     static_cast<double>(drops.size()));
  }

  double mean_ue_rate(int k) const {
    double sum = 0.0;
    for (const auto& d : drops) sum += d.per_ue_rates.at(k);
    return sum / static_cast<double>(drops.size());
  }
};

/// Paired Monte-Carlo: drop i of every scheme and sweep point shares the
/// same derived seed (so schemes see identical channel realizations), and
/// drops run independently across workers with results stored by index.
inline std::vector<MonteCarloPoint> monte_carlo(
    const SystemConfig& base, const std::vector<SchemeSpec>& schemes,
    int n_drops, const std::optional<std::string>& axis,
    const std::vector<double>& grid, int jobs = 1) {
  if (n_drops < 1) throw std::invalid_argument("n_drops must be >= 1");
  std::vector<double> values = axis ? grid : std::vector<double>{0.0};
  if (values.empty()) throw std::invalid_argument("empty sweep grid");

  std::vector<MonteCarloPoint> points;
  for (double value : values) {
    SystemConfig cfg = base;
    if (axis) {
      apply_sweep_axis(cfg, *axis, value);
      require_valid(cfg);
    }
    for (const auto& scheme : schemes) {
      MonteCarloPoint point;
      point.sweep_value = value;
      point.scheme = scheme;
      point.drops.resize(n_drops);
      parallel_for(n_drops, jobs, [&](int i) {
        point.drops[i] =
            run_scheme(scheme, cfg, drop_seed(cfg.rng_seed, i));
      });
      points.push_back(std::move(point));
    }
  }
  return points;
}

} // namespace riscf
