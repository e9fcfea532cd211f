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
#include <vector>

#include "riscf/rng.hpp"

namespace riscf {

/// Per-RIS unit-modulus phase vectors phi[m], |phi[m][n]| = 1.
struct PhaseConfig {
  std::vector<arma::cx_vec> phi;

  static PhaseConfig all_ones(int num_ris, int num_elements) {
    PhaseConfig out;
    out.phi.assign(num_ris,
                   arma::cx_vec(num_elements, arma::fill::ones));
    return out;
  }

  static PhaseConfig random(int num_ris, int num_elements, Rng& rng) {
    PhaseConfig out;
    out.phi.reserve(num_ris);
    for (int m = 0; m < num_ris; ++m)
      out.phi.push_back(rng.unit_phases(num_elements));
    return out;
  }
};

inline bool is_unit_modulus(const arma::cx_vec& phi, double tol = 1e-12) {
  for (arma::uword i = 0; i < phi.n_elem; ++i)
    if (std::abs(std::abs(phi(i)) - 1.0) > tol) return false;
  return true;
}

/// Snaps each phase to the nearest element of {0, 2pi/2^bits, ...},
/// treating the circle boundary correctly (an angle just below 2*pi maps
/// to 0).
inline arma::cx_vec quantize_phase_vector(const arma::cx_vec& phi, int bits) {
  const double two_pi = 2.0 * arma::datum::pi;
  const long levels = 1L << bits;
  const double step = two_pi / static_cast<double>(levels);
  arma::cx_vec out(phi.n_elem);
  for (arma::uword i = 0; i < phi.n_elem; ++i) {
    double theta = std::arg(phi(i));
    if (theta < 0.0) theta += two_pi;
    const long q = std::lround(theta / step) % levels;
    out(i) = std::polar(1.0, static_cast<double>(q) * step);
  }
  return out;
}

inline PhaseConfig quantize_phases(const PhaseConfig& phases, int bits) {
  PhaseConfig out;
  out.phi.reserve(phases.phi.size());
  for (const auto& phi : phases.phi)
    out.phi.push_back(quantize_phase_vector(phi, bits));
  return out;
}

} // namespace riscf
