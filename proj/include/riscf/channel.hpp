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
#include <stdexcept>
#include <vector>

#include "riscf/config.hpp"
#include "riscf/matching.hpp"
#include "riscf/phases.hpp"
#include "riscf/rng.hpp"
#include "riscf/topology.hpp"

namespace riscf {

/// All channels of one network drop.
///
/// direct[k]   : N_r x B*N_t, APs concatenated along columns
/// ap_ris[m]   : N  x B*N_t
/// ris_ue[m][k]: N_r x N
///
/// The *_los members hold the cascaded links with only their LoS part
/// (path loss and Rician weight included); they back the LoS-only
/// channel-knowledge variant and are not used otherwise.
struct ChannelSet {
  std::vector<arma::cx_mat> direct;
  std::vector<arma::cx_mat> ap_ris;
  std::vector<std::vector<arma::cx_mat>> ris_ue;
  std::vector<arma::cx_mat> ap_ris_los;
  std::vector<std::vector<arma::cx_mat>> ris_ue_los;

  int num_ues() const { return static_cast<int>(direct.size()); }
  int num_ris() const { return static_cast<int>(ap_ris.size()); }
};

/// Large-scale gain in dB (negative). Distances below the 1 m reference
/// are clamped rather than rejected so extreme geometry sweeps cannot
/// crash a run.
inline double path_loss_db(double distance_m, double exponent,
                           double carrier_ghz, double pl_ref_db) {
  const double d = std::max(distance_m, 1.0);
  return -pl_ref_db - 10.0 * exponent * std::log10(d) -
         20.0 * std::log10(carrier_ghz);
}

/// Antenna panel layout with half-wavelength spacing. ULAs extend along
/// the x axis; UPAs span the xz plane. Element (p, q) sits at
/// (p, 0, q) * lambda/2, indexed x-major.
struct ArraySpec {
  int nx = 1;
  int nz = 1;

  static ArraySpec ula(int n) { return ArraySpec{n, 1}; }
  static ArraySpec upa(int nh, int nv) { return ArraySpec{nh, nv}; }
  int count() const { return nx * nz; }
};

namespace detail {

/// Steering vector toward unit direction u (direction cosines u_x, u_z).
inline arma::cx_vec steering_vector(const ArraySpec& spec,
                                    const arma::vec& u) {
  arma::cx_vec a(spec.count());
  for (int q = 0; q < spec.nz; ++q)
    for (int p = 0; p < spec.nx; ++p) {
      const double phase = arma::datum::pi * (p * u(0) + q * u(2));
      a(q * spec.nx + p) = std::polar(1.0, phase);
    }
  return a;
}

} // namespace detail

/// Deterministic LoS matrix (rx_count x tx_count): outer product of the
/// receive and transmit steering vectors for the given geometry. Every
/// entry has unit modulus.
inline arma::cx_mat los_component(const arma::vec& tx_pos,
                                  const arma::vec& rx_pos,
                                  const ArraySpec& tx_spec,
                                  const ArraySpec& rx_spec) {
  arma::vec diff = rx_pos - tx_pos;
  const double d = arma::norm(diff, 2);
  if (d <= 0.0)
    throw std::invalid_argument("los_component: coincident positions");
  const arma::vec u_tx = diff / d;       // departure direction at tx
  const arma::vec u_rx = -u_tx;          // arrival direction at rx
  const arma::cx_vec a_tx = detail::steering_vector(tx_spec, u_tx);
  const arma::cx_vec a_rx = detail::steering_vector(rx_spec, u_rx);
  return a_rx * a_tx.st();
}

namespace detail {

struct FadedLink {
  arma::cx_mat total;
  arma::cx_mat los; // LoS part only, same scaling applied
};

/// sqrt(linear PL) * ( sqrt(beta/(1+beta)) LoS + sqrt(1/(1+beta)) NLoS ),
/// NLoS entries i.i.d. CN(0,1) so the linear path loss carries the full
/// average link power.
inline FadedLink rician_link(const arma::vec& tx_pos, const arma::vec& rx_pos,
                             const ArraySpec& tx_spec,
                             const ArraySpec& rx_spec, double exponent,
                             double beta, const SystemConfig& cfg, Rng& rng) {
  const double d = arma::norm(rx_pos - tx_pos, 2);
  const double pl_lin =
      db_to_linear(path_loss_db(d, exponent, cfg.carrier_ghz, cfg.pl_ref_db));
  const double amp = std::sqrt(pl_lin);
  const double w_los = std::sqrt(beta / (1.0 + beta));
  const double w_nlos = std::sqrt(1.0 / (1.0 + beta));

  FadedLink link;
  const arma::cx_mat nlos =
      rng.cgauss_mat(rx_spec.count(), tx_spec.count());
  if (w_los > 0.0) {
    link.los = amp * w_los * los_component(tx_pos, rx_pos, tx_spec, rx_spec);
    link.total = link.los + amp * w_nlos * nlos;
  } else {
    link.los.zeros(rx_spec.count(), tx_spec.count());
    link.total = amp * w_nlos * nlos;
  }
  return link;
}

} // namespace detail

/// Draws all small-scale fading for one drop. Draw order is fixed
/// (direct links UE-major, then AP-RIS links, then RIS-UE links) so a
/// given (topology, seed) always produces the same channels.
inline ChannelSet generate_channels(const Topology& topo,
                                    const SystemConfig& cfg, Rng& rng) {
  const ArraySpec ap = ArraySpec::ula(cfg.ap_antennas);
  const ArraySpec ue = ArraySpec::ula(cfg.ue_antennas);
  const ArraySpec ris = ArraySpec::upa(cfg.ris_grid_h, cfg.ris_grid_v);
  const int num_aps = cfg.num_aps;
  const int num_ues = cfg.num_ues;
  const int num_ris = cfg.num_ris;

  ChannelSet ch;
  ch.direct.resize(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    arma::cx_mat h(cfg.ue_antennas, cfg.total_tx());
    for (int b = 0; b < num_aps; ++b) {
      const auto link =
          detail::rician_link(topo.ap.col(b), topo.ue.col(k), ap, ue,
                              cfg.alpha_au, cfg.beta_au, cfg, rng);
      h.cols(b * cfg.ap_antennas, (b + 1) * cfg.ap_antennas - 1) = link.total;
    }
    ch.direct[k] = std::move(h);
  }

  ch.ap_ris.resize(num_ris);
  ch.ap_ris_los.resize(num_ris);
  for (int m = 0; m < num_ris; ++m) {
    arma::cx_mat g(cfg.ris_elements(), cfg.total_tx());
    arma::cx_mat g_los(cfg.ris_elements(), cfg.total_tx());
    for (int b = 0; b < num_aps; ++b) {
      const auto link =
          detail::rician_link(topo.ap.col(b), topo.ris.col(m), ap, ris,
                              cfg.alpha_ar, cfg.beta_ar, cfg, rng);
      g.cols(b * cfg.ap_antennas, (b + 1) * cfg.ap_antennas - 1) = link.total;
      g_los.cols(b * cfg.ap_antennas, (b + 1) * cfg.ap_antennas - 1) =
          link.los;
    }
    ch.ap_ris[m] = std::move(g);
    ch.ap_ris_los[m] = std::move(g_los);
  }

  ch.ris_ue.assign(num_ris, std::vector<arma::cx_mat>(num_ues));
  ch.ris_ue_los.assign(num_ris, std::vector<arma::cx_mat>(num_ues));
  for (int m = 0; m < num_ris; ++m)
    for (int k = 0; k < num_ues; ++k) {
      const auto link =
          detail::rician_link(topo.ris.col(m), topo.ue.col(k), ris, ue,
                              cfg.alpha_ru, cfg.beta_ru, cfg, rng);
      ch.ris_ue[m][k] = link.total;
      ch.ris_ue_los[m][k] = link.los;
    }
  return ch;
}

namespace detail {

/// Adds per-entry estimation error e ~ CN(0, delta |h|^2).
inline void add_entry_error(arma::cx_mat& h, double delta, Rng& rng) {
  if (delta <= 0.0) return;
  const double amp = std::sqrt(delta);
  for (arma::uword i = 0; i < h.n_elem; ++i)
    h(i) += amp * std::abs(h(i)) * rng.cgauss();
}

} // namespace detail

/// Produces the estimated channels used for design. With zero error
/// ratios and los_only = false this is the identity. los_only replaces
/// the cascaded links by their LoS parts instead of adding error; the
/// direct-link ratio still applies.
inline ChannelSet corrupt_csi(const ChannelSet& ch, const CsiErrorSpec& spec,
                              Rng& rng) {
  ChannelSet out = ch;
  for (auto& h : out.direct) detail::add_entry_error(h, spec.delta_d, rng);
  if (spec.los_only) {
    out.ap_ris = ch.ap_ris_los;
    out.ris_ue = ch.ris_ue_los;
  } else {
    for (auto& g : out.ap_ris) detail::add_entry_error(g, spec.delta_r, rng);
    for (auto& row : out.ris_ue)
      for (auto& h : row) detail::add_entry_error(h, spec.delta_r, rng);
  }
  return out;
}

/// Equivalent channel of UE k: the direct link plus every associated
/// RIS's reflected cascade. With an empty association this is exactly
/// direct[k].
inline arma::cx_mat effective_channel(const ChannelSet& ch,
                                      const Association& assoc,
                                      const PhaseConfig& phases, int ue) {
  if (ue < 0 || ue >= ch.num_ues())
    throw std::out_of_range("effective_channel: UE index");
  arma::cx_mat h = ch.direct[ue];
  for (int m : assoc.ris_of_ue[ue]) {
    arma::cx_mat scaled = ch.ap_ris[m]; // diag(phi) * G scales row n by phi_n
    scaled.each_col() %= phases.phi[m];
    h += ch.ris_ue[m][ue] * scaled;
  }
  return h;
}

inline std::vector<arma::cx_mat> effective_channels(
    const ChannelSet& ch, const Association& assoc, const PhaseConfig& phases) {
  std::vector<arma::cx_mat> out(ch.num_ues());
  for (int k = 0; k < ch.num_ues(); ++k)
    out[k] = effective_channel(ch, assoc, phases, k);
  return out;
}

} // namespace riscf
