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
//
// Independent reference implementations used only by the test suites.
// Everything here takes the slow, obviously-correct route (dense
// Kronecker products, exhaustive enumeration, grid search, generic
// projected-gradient solvers) and never shares code with the library
// paths it checks.

#pragma once

#include <armadillo>
#include <functional>
#include <vector>

#include "riscf.hpp"

namespace oracle {

// --------------------------------------------------------------------------
// Channels
// --------------------------------------------------------------------------

/// Equivalent channel evaluated with explicit diagonal phase matrices.
inline arma::cx_mat naive_effective_channel(const riscf::ChannelSet& ch,
                                            const riscf::Association& assoc,
                                            const riscf::PhaseConfig& phases,
                                            int ue) {
  arma::cx_mat h = ch.direct[ue];
  for (int m = 0; m < ch.num_ris(); ++m) {
    if (!assoc.matched(m, ue)) continue;
    const arma::cx_mat phi = arma::diagmat(phases.phi[m]);
    h += ch.ris_ue[m][ue] * phi * ch.ap_ris[m];
  }
  return h;
}

/// Diagonal-selected columns of the fully materialized Kronecker product.
inline arma::cx_mat kron_cascade_columns(const arma::cx_mat& ris_ue,
                                         const arma::cx_mat& ap_ris) {
  const arma::uword n = ap_ris.n_rows;
  const arma::cx_mat full = arma::kron(ap_ris.st(), ris_ue);
  arma::cx_mat out(full.n_rows, n);
  for (arma::uword i = 0; i < n; ++i) out.col(i) = full.col(i * (n + 1));
  return out;
}

// --------------------------------------------------------------------------
// Phase optimization
// --------------------------------------------------------------------------

/// Cyclic per-element grid search on g(phi) = phi^H Q phi + 2 Re(phi^H r).
inline arma::cx_vec grid_search_phases(const arma::cx_mat& quad,
                                       const arma::cx_vec& lin,
                                       int grid_points, int sweeps) {
  arma::cx_vec phi(quad.n_rows, arma::fill::ones);
  auto objective = [&](const arma::cx_vec& p) {
    return riscf::phase_objective(quad, lin, p);
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (arma::uword i = 0; i < phi.n_elem; ++i) {
      double best = objective(phi);
      arma::cx_double best_value = phi(i);
      for (int g = 0; g < grid_points; ++g) {
        const double theta = 2.0 * arma::datum::pi * g / grid_points;
        phi(i) = std::polar(1.0, theta);
        const double value = objective(phi);
        if (value > best) {
          best = value;
          best_value = phi(i);
        }
      }
      phi(i) = best_value;
    }
  }
  return phi;
}

// --------------------------------------------------------------------------
// Matching
// --------------------------------------------------------------------------

/// All quota-feasible matchings over admissible pairs that admit no
/// blocking pair, by exhaustive enumeration. Only usable for tiny games.
inline std::vector<arma::umat> stable_matchings(
    const riscf::PreferenceTable& prefs, const riscf::SystemConfig& cfg) {
  const int num_ues = prefs.num_ues();
  const int num_ris = prefs.num_ris();
  const int cells = num_ues * num_ris;
  std::vector<arma::umat> stable;

  for (long mask = 0; mask < (1L << cells); ++mask) {
    arma::umat c(num_ris, num_ues, arma::fill::zeros);
    bool feasible = true;
    for (int m = 0; m < num_ris && feasible; ++m)
      for (int k = 0; k < num_ues && feasible; ++k) {
        if (!((mask >> (m * num_ues + k)) & 1)) continue;
        if (prefs.utility(k, m) < prefs.threshold(k)) feasible = false;
        c(m, k) = 1;
      }
    if (!feasible) continue;
    for (int m = 0; m < num_ris; ++m)
      if (arma::accu(c.row(m)) > static_cast<arma::uword>(cfg.quota_ue_per_ris))
        feasible = false;
    for (int k = 0; k < num_ues; ++k)
      if (arma::accu(c.col(k)) > static_cast<arma::uword>(cfg.quota_ris_per_ue))
        feasible = false;
    if (!feasible) continue;

    bool blocked = false;
    for (int m = 0; m < num_ris && !blocked; ++m)
      for (int k = 0; k < num_ues && !blocked; ++k) {
        if (c(m, k) || prefs.utility(k, m) < prefs.threshold(k)) continue;
        bool ue_gains = false;
        for (int mp = 0; mp < num_ris && !ue_gains; ++mp)
          if (c(mp, k) && prefs.ue_prefers(k, m, mp)) ue_gains = true;
        if (!ue_gains) continue;
        for (int kp = 0; kp < num_ues && !blocked; ++kp)
          if (c(m, kp) && prefs.ris_prefers(m, k, kp)) blocked = true;
      }
    if (!blocked) stable.push_back(c);
  }
  return stable;
}

// --------------------------------------------------------------------------
// Beamforming
// --------------------------------------------------------------------------

/// Textbook single-user MIMO water-filling: W = V diag(p) V^H with
/// p_i = max(0, nu - sigma^2 / s_i^2), water level nu found by bisection
/// so the powers sum to the budget.
inline arma::cx_mat single_user_waterfill(const arma::cx_mat& channel,
                                          double power_mw, double noise_mw) {
  arma::cx_mat left, right;
  arma::vec s;
  arma::svd_econ(left, s, right, channel);

  auto total = [&](double nu) {
    double sum = 0.0;
    for (arma::uword i = 0; i < s.n_elem; ++i) {
      if (s(i) < 1e-30) continue;
      sum += std::max(0.0, nu - noise_mw / (s(i) * s(i)));
    }
    return sum;
  };
  double lo = 0.0, hi = power_mw + noise_mw / (s.max() * s.max()) + 1.0;
  while (total(hi) < power_mw) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < power_mw ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  arma::vec p(s.n_elem, arma::fill::zeros);
  for (arma::uword i = 0; i < s.n_elem; ++i)
    if (s(i) >= 1e-30) p(i) = std::max(0.0, nu - noise_mw / (s(i) * s(i)));
  return right * arma::diagmat(p) * right.t();
}

inline arma::cx_mat psd_project(const arma::cx_mat& x) {
  arma::vec eigval;
  arma::cx_mat eigvec;
  arma::eig_sym(eigval, eigvec, 0.5 * (x + x.t()));
  for (arma::uword i = 0; i < eigval.n_elem; ++i)
    eigval(i) = std::max(eigval(i), 0.0);
  return eigvec * arma::diagmat(eigval) * eigvec.t();
}

inline double logdet_capacity(const arma::cx_mat& channel,
                              const arma::cx_mat& covariance) {
  const arma::cx_mat inner =
      arma::cx_mat(arma::eye<arma::cx_mat>(channel.n_rows, channel.n_rows)) +
      channel * covariance * channel.t();
  return arma::log_det_sympd(0.5 * (inner + inner.t()));
}

/// Projected-gradient ascent for the per-UE dual subproblem
///   max_{S >= 0}  omega ln|I + G S G^H| - Tr(M S).
inline arma::cx_mat pg_dual_subproblem(const arma::cx_mat& g,
                                       const arma::cx_mat& weight,
                                       double omega, int iterations = 4000) {
  const arma::uword r = g.n_cols;
  arma::cx_mat s(r, r, arma::fill::zeros);
  auto value = [&](const arma::cx_mat& x) {
    return omega * logdet_capacity(g, x) -
           std::real(arma::trace(weight * x));
  };
  double fs = value(s);
  double step = 1.0 / (1.0 + std::pow(arma::norm(g, 2), 2));
  for (int it = 0; it < iterations; ++it) {
    const arma::cx_mat inner =
        arma::cx_mat(arma::eye<arma::cx_mat>(g.n_rows, g.n_rows)) +
        g * s * g.t();
    const arma::cx_mat grad = omega * g.t() * arma::inv_sympd(
                                  0.5 * (inner + inner.t())) * g - weight;
    bool accepted = false;
    for (int half = 0; half < 50; ++half) {
      const arma::cx_mat trial = psd_project(s + step * grad);
      const double ft = value(trial);
      if (ft >= fs) {
        const double gain = ft - fs;
        s = trial;
        fs = ft;
        accepted = true;
        step *= 1.3;
        if (gain < 1e-13 * std::max(1.0, std::abs(fs)) && it > 100)
          return s;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return s;
  }
  return s;
}

/// The ZF-eliminated downlink power allocation problem,
///   max sum_k omega_k ln|I + G_k S_k G_k^H|
///   s.t. sum_k <Z_{b,k}, S_k> <= P_b,  S_k >= 0,
/// solved by projected gradient with a Dykstra projection onto the
/// intersection of the PSD cones and the power half-spaces.
struct ZfProblem {
  std::vector<arma::cx_mat> g;                  // per UE, N_r x r
  std::vector<std::vector<arma::cx_mat>> z;     // [b][k], r x r Hermitian
  arma::vec budget;                             // per AP, mW
  arma::vec omega;                              // per UE
};

inline double zf_objective(const ZfProblem& prob,
                           const std::vector<arma::cx_mat>& s) {
  double total = 0.0;
  for (size_t k = 0; k < s.size(); ++k)
    total += prob.omega(k) * logdet_capacity(prob.g[k], s[k]);
  return total;
}

inline arma::vec zf_powers(const ZfProblem& prob,
                           const std::vector<arma::cx_mat>& s) {
  arma::vec power(prob.budget.n_elem, arma::fill::zeros);
  for (arma::uword b = 0; b < prob.budget.n_elem; ++b)
    for (size_t k = 0; k < s.size(); ++k)
      power(b) += std::real(arma::trace(prob.z[b][k] * s[k]));
  return power;
}

/// Dykstra's alternating projections onto PSD cones and half-spaces.
inline void dykstra_project(const ZfProblem& prob,
                            std::vector<arma::cx_mat>& s, int rounds) {
  const size_t num_ues = s.size();
  const arma::uword num_aps = prob.budget.n_elem;
  std::vector<arma::cx_mat> psd_residual(num_ues);
  for (size_t k = 0; k < num_ues; ++k)
    psd_residual[k].zeros(s[k].n_rows, s[k].n_cols);
  std::vector<std::vector<arma::cx_mat>> half_residual(num_aps, psd_residual);

  arma::vec z_norm2(num_aps, arma::fill::zeros);
  for (arma::uword b = 0; b < num_aps; ++b)
    for (size_t k = 0; k < num_ues; ++k)
      z_norm2(b) += std::pow(arma::norm(prob.z[b][k], "fro"), 2);

  for (int round = 0; round < rounds; ++round) {
    for (size_t k = 0; k < num_ues; ++k) {
      const arma::cx_mat y = s[k] + psd_residual[k];
      s[k] = psd_project(y);
      psd_residual[k] = y - s[k];
    }
    for (arma::uword b = 0; b < num_aps; ++b) {
      double inner = -prob.budget(b);
      std::vector<arma::cx_mat> y(num_ues);
      for (size_t k = 0; k < num_ues; ++k) {
        y[k] = s[k] + half_residual[b][k];
        inner += std::real(arma::trace(prob.z[b][k] * y[k]));
      }
      const double scale = inner > 0.0 ? inner / z_norm2(b) : 0.0;
      for (size_t k = 0; k < num_ues; ++k) {
        s[k] = y[k] - scale * prob.z[b][k];
        half_residual[b][k] = y[k] - s[k];
      }
    }
  }
}

inline std::vector<arma::cx_mat> pg_zf_problem(const ZfProblem& prob,
                                               int iterations = 1500) {
  const size_t num_ues = prob.g.size();
  std::vector<arma::cx_mat> s(num_ues);
  for (size_t k = 0; k < num_ues; ++k)
    s[k].zeros(prob.g[k].n_cols, prob.g[k].n_cols);

  double fs = zf_objective(prob, s);
  double step = 0.5;
  for (int it = 0; it < iterations; ++it) {
    std::vector<arma::cx_mat> grad(num_ues);
    for (size_t k = 0; k < num_ues; ++k) {
      const auto& g = prob.g[k];
      const arma::cx_mat inner =
          arma::cx_mat(arma::eye<arma::cx_mat>(g.n_rows, g.n_rows)) +
          g * s[k] * g.t();
      grad[k] = prob.omega(k) * g.t() *
                arma::inv_sympd(0.5 * (inner + inner.t())) * g;
    }
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<arma::cx_mat> trial(num_ues);
      for (size_t k = 0; k < num_ues; ++k)
        trial[k] = s[k] + step * grad[k];
      dykstra_project(prob, trial, 80);
      const double ft = zf_objective(prob, trial);
      if (ft >= fs - 1e-14) {
        s = std::move(trial);
        fs = ft;
        accepted = true;
        step *= 1.2;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  // Final exact-feasibility cleanup.
  dykstra_project(prob, s, 400);
  for (size_t k = 0; k < num_ues; ++k) s[k] = psd_project(s[k]);
  const arma::vec power = zf_powers(prob, s);
  double worst = 1.0;
  for (arma::uword b = 0; b < power.n_elem; ++b)
    if (power(b) > prob.budget(b))
      worst = std::max(worst, power(b) / prob.budget(b));
  if (worst > 1.0)
    for (auto& x : s) x /= worst;
  return s;
}

// --------------------------------------------------------------------------
// Rates
// --------------------------------------------------------------------------

/// Rate via eigenvalues of the interference-whitened signal covariance.
inline double whitened_rate(int ue,
                            const std::vector<arma::cx_mat>& effective,
                            const std::vector<arma::cx_mat>& precoders,
                            double noise_mw) {
  const arma::uword nr = effective.at(ue).n_rows;
  arma::cx_mat noise_plus_interference(nr, nr, arma::fill::zeros);
  noise_plus_interference.diag() += noise_mw;
  for (size_t i = 0; i < precoders.size(); ++i) {
    if (static_cast<int>(i) == ue) continue;
    const arma::cx_mat path = effective[ue] * precoders[i];
    noise_plus_interference += path * path.t();
  }
  arma::vec eigval;
  arma::cx_mat eigvec;
  arma::eig_sym(eigval, eigvec,
                0.5 * (noise_plus_interference + noise_plus_interference.t()));
  arma::vec inv_sqrt(eigval.n_elem);
  for (arma::uword i = 0; i < eigval.n_elem; ++i)
    inv_sqrt(i) = 1.0 / std::sqrt(eigval(i));
  const arma::cx_mat whiten = eigvec * arma::diagmat(inv_sqrt) * eigvec.t();

  const arma::cx_mat path = whiten * effective[ue] * precoders[ue];
  const arma::cx_mat signal = path * path.t();
  arma::vec lam;
  arma::eig_sym(lam, 0.5 * (signal + signal.t()));
  double rate = 0.0;
  for (arma::uword i = 0; i < lam.n_elem; ++i)
    rate += std::log2(1.0 + std::max(lam(i), 0.0));
  return rate;
}

/// WSR of a zero-forcing design evaluated without interference terms.
inline double zf_wsr_bits(const std::vector<arma::cx_mat>& effective,
                          const std::vector<arma::cx_mat>& covariances,
                          const arma::vec& omega, double noise_mw) {
  const double sigma = std::sqrt(noise_mw);
  double wsr = 0.0;
  for (size_t k = 0; k < effective.size(); ++k) {
    const arma::cx_mat g = effective[k] / sigma;
    wsr += omega(k) * logdet_capacity(g, covariances[k]) / std::log(2.0);
  }
  return wsr;
}

} // namespace oracle
