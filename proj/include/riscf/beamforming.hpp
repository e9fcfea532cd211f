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

namespace riscf {

/// Orthonormal basis of the joint null space of every other UE's
/// effective channel. Confining UE k's precoder to it zeroes all
/// inter-user interference.
struct NullSpaceBasis {
  arma::cx_mat basis; // (B*N_t) x (B*N_t - (K-1)*N_r)
  bool rank_deficient = false;
};

/// Null space via the full SVD of the stacked other-UE channels. If the
/// stack is row-rank-deficient the true null space is larger; the
/// trailing basis vectors are still returned and the condition flagged.
inline NullSpaceBasis null_space_basis(
    const std::vector<arma::cx_mat>& effective, int ue) {
  const int num_ues = static_cast<int>(effective.size());
  const arma::uword total_tx = effective.at(0).n_cols;
  arma::uword stacked_rows = 0;
  for (int i = 0; i < num_ues; ++i)
    if (i != ue) stacked_rows += effective[i].n_rows;

  NullSpaceBasis out;
  if (stacked_rows == 0) {
    out.basis = arma::cx_mat(total_tx, total_tx, arma::fill::eye);
    return out;
  }
  if (stacked_rows >= total_tx)
    throw std::invalid_argument(
        "null_space_basis: stacked channels leave no null space "
        "(K*N_r > B*N_t)");

  arma::cx_mat stacked(stacked_rows, total_tx);
  arma::uword row = 0;
  for (int i = 0; i < num_ues; ++i) {
    if (i == ue) continue;
    stacked.rows(row, row + effective[i].n_rows - 1) = effective[i];
    row += effective[i].n_rows;
  }

  arma::cx_mat left, right;
  arma::vec singulars;
  if (!arma::svd(left, singulars, right, stacked))
    throw std::runtime_error("null_space_basis: SVD failed");
  out.basis = right.cols(stacked_rows, total_tx - 1);
  out.rank_deficient =
      singulars(stacked_rows - 1) < 1e-10 * std::max(singulars(0), 1e-300);
  return out;
}

/// Inverse square root of a Hermitian PSD matrix via eigendecomposition;
/// eigenvalues are floored at eig_floor before inversion.
inline arma::cx_mat inv_sqrt_hermitian(const arma::cx_mat& m,
                                       double eig_floor = 1e-12) {
  arma::vec eigval;
  arma::cx_mat eigvec;
  const arma::cx_mat herm = 0.5 * (m + m.t());
  if (!arma::eig_sym(eigval, eigvec, herm))
    throw std::runtime_error("inv_sqrt_hermitian: eigendecomposition failed");
  arma::vec scaled(eigval.n_elem);
  for (arma::uword i = 0; i < eigval.n_elem; ++i)
    scaled(i) = 1.0 / std::sqrt(std::max(eigval(i), eig_floor));
  return eigvec * arma::diagmat(scaled) * eigvec.t();
}

/// Water-filling solution of one UE's dual subproblem at fixed dual
/// variables. Channels are noise-normalized before the reduced SVD, so
/// the per-stream powers follow max(0, omega - 1/singular^2) on the
/// normalized singular values exactly.
struct WaterfillResult {
  arma::cx_mat reduced;    // S_k, acting inside the null space
  arma::vec levels;        // per-stream powers, descending
  arma::vec singulars;     // noise-normalized singular values, descending
  arma::cx_mat m_inv_sqrt; // (E^H T_mu E)^{-1/2}
  arma::cx_mat e_hat;      // right singular vectors of the reduced channel
};

namespace detail {

/// t_mu expanded to a per-antenna diagonal with the per-AP floor applied.
/// The floor enters inversions only; reported duals stay unfloored.
inline arma::vec expand_t_mu(const arma::vec& mu, int ap_antennas,
                             double floor_value) {
  arma::vec diag(mu.n_elem * ap_antennas);
  for (arma::uword b = 0; b < mu.n_elem; ++b)
    diag.subvec(b * ap_antennas, (b + 1) * ap_antennas - 1)
        .fill(std::max(mu(b), floor_value));
  return diag;
}

/// Core water-filling given the noise-normalized in-null-space channel
/// scaled_basis = (H/sigma) * E_tilde.
inline WaterfillResult waterfill_core(const arma::cx_mat& scaled_basis,
                                      const arma::cx_mat& basis,
                                      const arma::vec& t_mu_diag,
                                      double omega) {
  const arma::cx_vec t_mu_cx(t_mu_diag,
                             arma::vec(t_mu_diag.n_elem, arma::fill::zeros));
  arma::cx_mat weighted = basis;
  weighted.each_col() %= t_mu_cx;
  const arma::cx_mat gram = basis.t() * weighted; // E^H T_mu E

  WaterfillResult wf;
  wf.m_inv_sqrt = inv_sqrt_hermitian(gram);
  const arma::cx_mat reduced_channel = scaled_basis * wf.m_inv_sqrt;

  arma::cx_mat left;
  if (!arma::svd_econ(left, wf.singulars, wf.e_hat, reduced_channel))
    throw std::runtime_error("waterfill: SVD failed");

  wf.levels.set_size(wf.singulars.n_elem);
  for (arma::uword i = 0; i < wf.singulars.n_elem; ++i) {
    const double s2 = wf.singulars(i) * wf.singulars(i);
    wf.levels(i) = s2 > 1e-300 ? std::max(0.0, omega - 1.0 / s2) : 0.0;
  }
  const arma::cx_mat core =
      wf.e_hat * arma::diagmat(wf.levels) * wf.e_hat.t();
  wf.reduced = wf.m_inv_sqrt * core * wf.m_inv_sqrt;
  return wf;
}

/// Cached per-drop quantities for the dual loop.
struct BdContext {
  std::vector<arma::cx_mat> basis;        // null-space basis per UE
  std::vector<arma::cx_mat> scaled_basis; // (H/sigma) * basis per UE
  arma::vec omega;
  int num_aps = 0;
  int ap_antennas = 0;
  double mu_floor = 1e-10;
  bool rank_deficient = false;

  /// Per-AP transmit power of UE k's covariance E S E^H.
  arma::vec ap_power(int k, const arma::cx_mat& reduced) const {
    const arma::cx_mat mixed = basis[k] * reduced; // L2 x r
    const arma::vec diag =
        arma::real(arma::sum(mixed % arma::conj(basis[k]), 1));
    arma::vec power(num_aps);
    for (int b = 0; b < num_aps; ++b)
      power(b) = arma::accu(
          diag.subvec(b * ap_antennas, (b + 1) * ap_antennas - 1));
    return power;
  }

  /// Total per-AP power after re-solving every UE subproblem at mu.
  arma::vec total_power(const arma::vec& mu,
                        std::vector<WaterfillResult>* out = nullptr) const {
    const arma::vec diag = expand_t_mu(mu, ap_antennas, mu_floor);
    arma::vec power(num_aps, arma::fill::zeros);
    if (out) out->resize(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) {
      auto wf = waterfill_core(scaled_basis[k], basis[k], diag,
                               omega(static_cast<arma::uword>(k)));
      power += ap_power(static_cast<int>(k), wf.reduced);
      if (out) (*out)[k] = std::move(wf);
    }
    return power;
  }
};

inline BdContext make_bd_context(const std::vector<arma::cx_mat>& effective,
                                 const SystemConfig& cfg) {
  BdContext ctx;
  ctx.num_aps = cfg.num_aps;
  ctx.ap_antennas = cfg.ap_antennas;
  ctx.mu_floor = cfg.mu_floor;
  ctx.omega.set_size(effective.size());
  const double sigma = std::sqrt(cfg.noise_mw());
  ctx.basis.resize(effective.size());
  ctx.scaled_basis.resize(effective.size());
  for (size_t k = 0; k < effective.size(); ++k) {
    auto ns = null_space_basis(effective, static_cast<int>(k));
    ctx.rank_deficient = ctx.rank_deficient || ns.rank_deficient;
    ctx.scaled_basis[k] = (effective[k] / sigma) * ns.basis;
    ctx.basis[k] = std::move(ns.basis);
    ctx.omega(static_cast<arma::uword>(k)) =
        cfg.weight(static_cast<int>(k));
  }
  return ctx;
}

} // namespace detail

/// Public form of the per-UE subproblem solver.
inline WaterfillResult waterfill_subproblem(const arma::cx_mat& effective_k,
                                            const arma::cx_mat& basis,
                                            const arma::vec& t_mu_diag,
                                            double omega, double noise_mw) {
  const double sigma = std::sqrt(noise_mw);
  return detail::waterfill_core((effective_k / sigma) * basis, basis,
                                t_mu_diag, omega);
}

/// AP b's total transmit power with all subproblems re-solved at mu.
/// Monotonically decreasing in mu(b) and vanishing as mu(b) grows.
inline double power_usage(int b, const arma::vec& mu,
                          const std::vector<arma::cx_mat>& effective,
                          const SystemConfig& cfg) {
  const auto ctx = detail::make_bd_context(effective, cfg);
  return ctx.total_power(mu)(b);
}

struct PrecoderSet {
  std::vector<arma::cx_mat> W; // covariance per UE, (B*N_t)^2
  std::vector<arma::cx_mat> F; // precoder per UE, B*N_t x N_s
  arma::vec mu;                // dual variable per AP
  std::vector<arma::vec> water_levels;
  arma::vec ap_power_mw;
  arma::mat mu_history;    // B x sweeps
  arma::mat power_history; // B x sweeps
  int outer_iterations = 0;
  bool converged = false;
  bool rank_deficient = false;
  double feasibility_scale = 1.0;
};

/// F_k from the water-filling factors, columns ordered by descending
/// per-stream power and truncated to num_streams.
inline arma::cx_mat recover_precoder(const arma::cx_mat& basis,
                                     const WaterfillResult& wf,
                                     int num_streams) {
  const arma::cx_mat full =
      basis * wf.m_inv_sqrt * wf.e_hat * arma::diagmat(arma::sqrt(wf.levels));
  const int cols = std::min<int>(num_streams, static_cast<int>(full.n_cols));
  arma::cx_mat out(full.n_rows, num_streams, arma::fill::zeros);
  out.cols(0, cols - 1) = full.cols(0, cols - 1);
  return out;
}

/// Gauss-Seidel dual loop over APs: each AP's dual variable is set to
/// zero when its constraint is slack at zero, otherwise found by
/// bisection so the AP transmits exactly its power budget. Sweeps repeat
/// until all duals are stable. The returned covariances satisfy every
/// power constraint (a final global scale, never more than one part in a
/// few thousand, absorbs Gauss-Seidel staleness).
inline PrecoderSet joint_bd(const std::vector<arma::cx_mat>& effective,
                            const SystemConfig& cfg) {
  const auto ctx = detail::make_bd_context(effective, cfg);
  const int num_aps = cfg.num_aps;
  const int num_ues = static_cast<int>(effective.size());
  const double budget = cfg.max_power_mw();

  arma::vec mu(num_aps);
  mu.fill(cfg.mu_init);

  std::vector<arma::vec> mu_history, power_history;
  bool converged = false;
  int sweeps = 0;
  for (; sweeps < cfg.bd_max_sweeps; ++sweeps) {
    const arma::vec prev = mu;
    for (int b = 0; b < num_aps; ++b) {
      auto power_b = [&](double value) {
        arma::vec trial = mu;
        trial(b) = value;
        return ctx.total_power(trial)(b);
      };
      if (power_b(0.0) <= budget) {
        mu(b) = 0.0;
        continue;
      }
      double hi = 100.0;
      for (int guard = 0; power_b(hi) >= budget && guard < 60; ++guard)
        hi *= 2.0;
      double lo = 0.0;
      for (int it = 0;
           (hi - lo) > cfg.bisection_tol * hi && it < cfg.bisection_max_iter;
           ++it) {
        const double mid = 0.5 * (lo + hi);
        if (power_b(mid) >= budget)
          lo = mid;
        else
          hi = mid;
      }
      mu(b) = hi; // feasible side of the bracket
    }

    mu_history.push_back(mu);
    power_history.push_back(ctx.total_power(mu));

    double change = 0.0;
    for (int b = 0; b < num_aps; ++b) {
      const double scale = std::max({std::abs(mu(b)), std::abs(prev(b)), 1e-12});
      change = std::max(change, std::abs(mu(b) - prev(b)) / scale);
    }
    if (change <= cfg.dual_tol) {
      converged = true;
      ++sweeps;
      break;
    }
  }

  std::vector<WaterfillResult> subproblems;
  ctx.total_power(mu, &subproblems);

  PrecoderSet out;
  out.mu = mu;
  out.converged = converged;
  out.rank_deficient = ctx.rank_deficient;
  out.outer_iterations = sweeps;
  out.mu_history.set_size(num_aps, mu_history.size());
  out.power_history.set_size(num_aps, power_history.size());
  for (size_t s = 0; s < mu_history.size(); ++s) {
    out.mu_history.col(s) = mu_history[s];
    out.power_history.col(s) = power_history[s];
  }

  out.F.resize(num_ues);
  out.W.resize(num_ues);
  out.water_levels.resize(num_ues);
  arma::vec final_power(num_aps, arma::fill::zeros);
  for (int k = 0; k < num_ues; ++k) {
    out.F[k] = recover_precoder(ctx.basis[k], subproblems[k],
                                cfg.num_streams());
    out.W[k] = out.F[k] * out.F[k].t();
    out.water_levels[k] = subproblems[k].levels;
    const arma::vec diag = arma::real(out.W[k].diag());
    for (int b = 0; b < num_aps; ++b)
      final_power(b) += arma::accu(diag.subvec(
          b * cfg.ap_antennas, (b + 1) * cfg.ap_antennas - 1));
  }

  double violation = 0.0;
  for (int b = 0; b < num_aps; ++b)
    violation = std::max(violation, final_power(b) / budget);
  if (violation > 1.0) {
    const double scale = 1.0 / violation;
    for (int k = 0; k < num_ues; ++k) {
      out.F[k] *= std::sqrt(scale);
      out.W[k] *= scale;
    }
    final_power *= scale;
    out.feasibility_scale = scale;
  }
  out.ap_power_mw = final_power;
  return out;
}

} // namespace riscf
