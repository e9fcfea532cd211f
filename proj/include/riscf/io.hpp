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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riscf/channel.hpp"
#include "riscf/config.hpp"
#include "riscf/evaluate.hpp"

namespace riscf {

constexpr const char* kVersion = "0.1.0";

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Short content-derived run identifier: FNV-1a over the resolved config
/// and the seed.
inline std::string provenance_string(const SystemConfig& cfg,
                                     std::uint64_t seed) {
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 1099511628211ULL;
    }
  };
  for (const auto& line : config_echo(cfg)) mix(line);
  mix(std::to_string(seed));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "riscf-%s+%016llx", kVersion,
                static_cast<unsigned long long>(hash));
  return buf;
}

/// Comment header common to every emitted CSV file: the provenance line
/// followed by the full resolved configuration.
inline void write_csv_header(std::ostream& out, const SystemConfig& cfg,
                             std::uint64_t seed) {
  out << "# " << provenance_string(cfg, seed) << "\n";
  for (const auto& line : config_echo(cfg)) out << "# " << line << "\n";
}

inline void write_sweep_csv(std::ostream& out,
                            const std::vector<MonteCarloPoint>& points,
                            const SystemConfig& cfg) {
  write_csv_header(out, cfg, cfg.rng_seed);
  out << "sweep_value,scheme,mean_wsr,stderr,n\n";
  for (const auto& p : points) {
    out << format_value(p.sweep_value) << "," << p.scheme.label() << ","
        << format_value(p.mean_wsr()) << "," << format_value(p.stderr_wsr())
        << "," << p.drops.size() << "\n";
  }
}

inline void write_cdf_csv(std::ostream& out,
                          const std::vector<MonteCarloPoint>& points,
                          const SystemConfig& cfg) {
  write_csv_header(out, cfg, cfg.rng_seed);
  out << "scheme,wsr,cdf\n";
  for (const auto& p : points) {
    std::vector<double> samples;
    samples.reserve(p.drops.size());
    for (const auto& d : p.drops) samples.push_back(d.wsr);
    std::sort(samples.begin(), samples.end());
    for (size_t i = 0; i < samples.size(); ++i) {
      const double cdf =
          static_cast<double>(i + 1) / static_cast<double>(samples.size());
      out << p.scheme.label() << "," << format_value(samples[i]) << ","
          << format_value(cdf) << "\n";
    }
  }
}

/// K x M 0/1 matrix, one UE per row.
inline void write_association_csv(std::ostream& out,
                                  const Association& assoc) {
  for (int k = 0; k < assoc.num_ues(); ++k) {
    for (int m = 0; m < assoc.num_ris(); ++m) {
      if (m) out << ",";
      out << (assoc.matched(m, k) ? 1 : 0);
    }
    out << "\n";
  }
}

inline nlohmann::json config_to_json(const SystemConfig& cfg) {
  nlohmann::json j;
  for (const auto& entry : detail::config_keys())
    j[entry.section + "." + entry.key] = entry.get(cfg);
  return j;
}

inline nlohmann::json run_result_to_json(const RunResult& result,
                                         const SystemConfig& cfg) {
  nlohmann::json j;
  j["provenance"] = provenance_string(cfg, result.seed);
  j["config"] = config_to_json(cfg);
  j["scheme"] = result.scheme;
  j["seed"] = result.seed;
  j["wsr"] = result.wsr;
  j["per_ue_rates"] = result.per_ue_rates;
  j["mm_iterations"] = result.mm_iterations;
  j["bd_outer_iterations"] = result.bd_outer_iterations;
  j["bd_converged"] = result.bd_converged;
  j["csi_channels_acquired"] = result.csi_channels_acquired;
  std::vector<std::vector<int>> assoc(result.association.num_ues());
  for (int k = 0; k < result.association.num_ues(); ++k) {
    assoc[k].resize(result.association.num_ris());
    for (int m = 0; m < result.association.num_ris(); ++m)
      assoc[k][m] = result.association.matched(m, k) ? 1 : 0;
  }
  j["association"] = assoc;
  std::vector<double> power(result.ap_power_mw.begin(),
                            result.ap_power_mw.end());
  j["ap_power_mw"] = power;
  return j;
}

namespace detail {

inline nlohmann::json matrix_to_json(const arma::cx_mat& m) {
  nlohmann::json j;
  j["rows"] = m.n_rows;
  j["cols"] = m.n_cols;
  nlohmann::json entries = nlohmann::json::array();
  for (arma::uword r = 0; r < m.n_rows; ++r)
    for (arma::uword c = 0; c < m.n_cols; ++c)
      entries.push_back({m(r, c).real(), m(r, c).imag()});
  j["entries"] = entries; // row-major (re, im) pairs
  return j;
}

inline arma::cx_mat matrix_from_json(const nlohmann::json& j) {
  const arma::uword rows = j.at("rows");
  const arma::uword cols = j.at("cols");
  arma::cx_mat m(rows, cols);
  const auto& entries = j.at("entries");
  arma::uword i = 0;
  for (arma::uword r = 0; r < rows; ++r)
    for (arma::uword c = 0; c < cols; ++c, ++i)
      m(r, c) = arma::cx_double(entries.at(i).at(0), entries.at(i).at(1));
  return m;
}

} // namespace detail

/// Channel regression format: one JSON document per drop holding the
/// three channel families as dimension-tagged (re, im) arrays. Intended
/// for cross-language comparisons of the channel generator.
inline nlohmann::json channels_to_json(const ChannelSet& ch,
                                       const SystemConfig& cfg,
                                       std::uint64_t seed) {
  nlohmann::json j;
  j["provenance"] = provenance_string(cfg, seed);
  j["config"] = config_to_json(cfg);
  j["seed"] = seed;
  j["direct"] = nlohmann::json::array();
  for (const auto& h : ch.direct) j["direct"].push_back(detail::matrix_to_json(h));
  j["ap_ris"] = nlohmann::json::array();
  for (const auto& g : ch.ap_ris) j["ap_ris"].push_back(detail::matrix_to_json(g));
  j["ris_ue"] = nlohmann::json::array();
  for (const auto& row : ch.ris_ue) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& h : row) jr.push_back(detail::matrix_to_json(h));
    j["ris_ue"].push_back(jr);
  }
  return j;
}

inline ChannelSet channels_from_json(const nlohmann::json& j) {
  ChannelSet ch;
  for (const auto& m : j.at("direct"))
    ch.direct.push_back(detail::matrix_from_json(m));
  for (const auto& m : j.at("ap_ris"))
    ch.ap_ris.push_back(detail::matrix_from_json(m));
  for (const auto& row : j.at("ris_ue")) {
    std::vector<arma::cx_mat> r;
    for (const auto& m : row) r.push_back(detail::matrix_from_json(m));
    ch.ris_ue.push_back(std::move(r));
  }
  return ch;
}

/// MM objective traces as (iteration, objective) rows, one block per RIS.
inline void write_mm_trace_csv(std::ostream& out,
                               const MmAggregateReport& report,
                               const SystemConfig& cfg, std::uint64_t seed) {
  write_csv_header(out, cfg, seed);
  out << "ris,iteration,objective\n";
  for (size_t m = 0; m < report.traces.size(); ++m)
    for (size_t t = 0; t < report.traces[m].size(); ++t)
      out << m << "," << t << "," << format_value(report.traces[m][t])
          << "\n";
}

/// Dual-loop diagnostics: per-sweep dual variables and per-AP powers,
/// then the per-UE water levels.
inline void write_bd_diagnostics_csv(std::ostream& out,
                                     const PrecoderSet& precoders,
                                     const SystemConfig& cfg,
                                     std::uint64_t seed) {
  write_csv_header(out, cfg, seed);
  out << "record,index,sweep,value\n";
  for (arma::uword s = 0; s < precoders.mu_history.n_cols; ++s)
    for (arma::uword b = 0; b < precoders.mu_history.n_rows; ++b) {
      out << "mu," << b << "," << s << ","
          << format_value(precoders.mu_history(b, s)) << "\n";
      out << "ap_power_mw," << b << "," << s << ","
          << format_value(precoders.power_history(b, s)) << "\n";
    }
  for (size_t k = 0; k < precoders.water_levels.size(); ++k)
    for (arma::uword i = 0; i < precoders.water_levels[k].n_elem; ++i)
      out << "water_level," << k << "," << i << ","
          << format_value(precoders.water_levels[k](i)) << "\n";
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

} // namespace riscf
