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

#include "riscf/channel.hpp"
#include "riscf/config.hpp"
#include "riscf/matching.hpp"
#include "riscf/phases.hpp"

namespace riscf {

/// Linear operator form of one RIS cascade. Column n of cascade equals
/// (row n of G)^T kron (column n of H_r); the full Kronecker product is
/// never materialized. quad = C^H C and lin = C^H vec(H_d) are cached
/// once so each optimizer iteration costs O(N^2).
struct CascadeOperator {
  arma::cx_mat cascade;  // (N_r * B*N_t) x N
  arma::cx_vec direct;   // vec(H_d), length N_r * B*N_t
  arma::cx_mat quad;     // N x N
  arma::cx_vec lin;      // length N
};

inline CascadeOperator build_cascade(const arma::cx_mat& ris_ue,
                                     const arma::cx_mat& ap_ris,
                                     const arma::cx_mat& direct) {
  const arma::uword n = ap_ris.n_rows;
  if (ris_ue.n_cols != n)
    throw std::invalid_argument("build_cascade: RIS element count mismatch");
  if (direct.n_rows != ris_ue.n_rows || direct.n_cols != ap_ris.n_cols)
    throw std::invalid_argument("build_cascade: direct channel dimensions");

  CascadeOperator op;
  op.cascade.set_size(direct.n_elem, n);
  for (arma::uword i = 0; i < n; ++i)
    op.cascade.col(i) = arma::kron(ap_ris.row(i).st(), ris_ue.col(i));
  op.direct = arma::vectorise(direct);
  op.quad = op.cascade.t() * op.cascade;
  op.lin = op.cascade.t() * op.direct;
  return op;
}

/// Phase-dependent part of the equivalent-channel energy,
/// g(phi) = phi^H quad phi + 2 Re(phi^H lin). Adding |vec(H_d)|^2 gives
/// the full squared Frobenius norm.
inline double phase_objective(const arma::cx_mat& quad, const arma::cx_vec& lin,
                              const arma::cx_vec& phi) {
  return std::real(arma::cdot(phi, quad * phi)) +
         2.0 * std::real(arma::cdot(phi, lin));
}

/// Reflected-path energy |C phi|^2 at the given phases.
inline double ris_part_power(const CascadeOperator& op,
                             const arma::cx_vec& phi) {
  return std::real(arma::cdot(phi, op.quad * phi));
}

struct MmResult {
  arma::cx_vec phi;
  std::vector<double> trace; // objective after 0, 1, ... updates
  int iterations = 0;        // closed-form updates until the stop test
  bool converged = false;
};

namespace detail {

/// Majorize-maximize iteration for max phi^H Q phi + 2 Re(phi^H r) over
/// unit-modulus phi: phi <- exp(j arg(Q phi + r)). Entries whose update
/// argument is numerically zero keep their previous phase (any phase is
/// optimal there). Stops when the objective change falls below
/// tol * scale or after max_iter updates.
inline MmResult mm_iterate(const arma::cx_mat& quad, const arma::cx_vec& lin,
                           const arma::cx_vec& init, double tol,
                           int max_iter) {
  if (!is_unit_modulus(init))
    throw std::invalid_argument("mm_iterate: init must be unit-modulus");

  MmResult res;
  res.phi = init;
  double g = phase_objective(quad, lin, res.phi);
  res.trace.push_back(g);
  for (int t = 0; t < max_iter; ++t) {
    const arma::cx_vec z = quad * res.phi + lin;
    arma::cx_vec next(z.n_elem);
    for (arma::uword i = 0; i < z.n_elem; ++i) {
      const double mag = std::abs(z(i));
      next(i) = mag < 1e-14 ? res.phi(i) : z(i) / mag;
    }
    res.phi = std::move(next);
    const double g_next = phase_objective(quad, lin, res.phi);
    res.trace.push_back(g_next);
    ++res.iterations;
    const double scale =
        std::max({std::abs(g_next), std::abs(g), 1e-300});
    if (std::abs(g_next - g) <= tol * scale) {
      res.converged = true;
      g = g_next;
      break;
    }
    g = g_next;
  }
  return res;
}

} // namespace detail

/// Optimizes one RIS's phases for a single (RIS, UE) pair.
inline MmResult mm_phase_pair(const CascadeOperator& op,
                              const arma::cx_vec& init, double tol,
                              int max_iter) {
  return detail::mm_iterate(op.quad, op.lin, init, tol, max_iter);
}

struct MmAggregateReport {
  int iterations_max = 0;
  std::vector<std::vector<double>> traces; // one per RIS (empty if unserved)
};

/// Stage-two phase design: one independent run per RIS on the quadratic
/// aggregated over its associated UEs. A RIS serving nobody keeps its
/// initial phases. When weighted_aggregate is set, each UE's term is
/// scaled by its rate weight.
inline PhaseConfig mm_phase_aggregate(const ChannelSet& ch,
                                      const Association& assoc,
                                      const SystemConfig& cfg,
                                      const PhaseConfig& init,
                                      MmAggregateReport* report = nullptr) {
  const int num_ris = ch.num_ris();
  PhaseConfig out = init;
  if (report) {
    report->iterations_max = 0;
    report->traces.assign(num_ris, {});
  }
  for (int m = 0; m < num_ris; ++m) {
    if (assoc.ue_of_ris[m].empty()) continue;
    const int n = static_cast<int>(ch.ap_ris[m].n_rows);
    arma::cx_mat quad(n, n, arma::fill::zeros);
    arma::cx_vec lin(n, arma::fill::zeros);
    for (int k : assoc.ue_of_ris[m]) {
      const auto op = build_cascade(ch.ris_ue[m][k], ch.ap_ris[m],
                                    ch.direct[k]);
      const double w = cfg.weighted_aggregate ? cfg.weight(k) : 1.0;
      quad += w * op.quad;
      lin += w * op.lin;
    }
    const auto res =
        detail::mm_iterate(quad, lin, init.phi[m], cfg.mm_tol,
                           cfg.mm_max_iter);
    out.phi[m] = res.phi;
    if (report) {
      report->iterations_max = std::max(report->iterations_max,
                                        res.iterations);
      report->traces[m] = res.trace;
    }
  }
  return out;
}

} // namespace riscf
