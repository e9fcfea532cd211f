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

#include "riscf/config.hpp"
#include "riscf/rng.hpp"

namespace riscf {

/// 3-D node positions for one network drop; columns are positions.
struct Topology {
  arma::mat ap;  // 3 x B
  arma::mat ris; // 3 x M
  arma::mat ue;  // 3 x K
};

/// APs sit on the vertices of a square of side ap_square_m centered at the
/// origin (cycling through the four vertices when B > 4). RISs are equally
/// spaced on the circle of diameter ris_diameter_m, or uniform inside the
/// disk when ris_on_ring is false. UEs are i.i.d. uniform in the UE square.
inline Topology generate_topology(const SystemConfig& cfg, Rng& rng) {
  Topology topo;
  const double half_ap = cfg.ap_square_m / 2.0;
  const double vertices[4][2] = {{half_ap, half_ap},
                                 {-half_ap, half_ap},
                                 {-half_ap, -half_ap},
                                 {half_ap, -half_ap}};
  topo.ap.set_size(3, cfg.num_aps);
  for (int b = 0; b < cfg.num_aps; ++b) {
    const auto& v = vertices[b % 4];
    topo.ap.col(b) = arma::vec{v[0], v[1], cfg.ap_height_m};
  }

  topo.ris.set_size(3, cfg.num_ris);
  const double radius = cfg.ris_diameter_m / 2.0;
  for (int m = 0; m < cfg.num_ris; ++m) {
    double r = radius;
    double theta = 2.0 * arma::datum::pi * m / cfg.num_ris;
    if (!cfg.ris_on_ring) {
      r = radius * std::sqrt(rng.uniform(0.0, 1.0));
      theta = rng.uniform(0.0, 2.0 * arma::datum::pi);
    }
    topo.ris.col(m) =
        arma::vec{r * std::cos(theta), r * std::sin(theta), cfg.ris_height_m};
  }

  topo.ue.set_size(3, cfg.num_ues);
  const double half_ue = cfg.ue_square_m / 2.0;
  for (int k = 0; k < cfg.num_ues; ++k) {
    topo.ue.col(k) = arma::vec{rng.uniform(-half_ue, half_ue),
                               rng.uniform(-half_ue, half_ue),
                               cfg.ue_height_m};
  }
  return topo;
}

inline double distance(const arma::vec& a, const arma::vec& b) {
  return arma::norm(a - b, 2);
}

} // namespace riscf
