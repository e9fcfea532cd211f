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

#include "riscf/channel.hpp"
#include "riscf/config.hpp"
#include "riscf/matching.hpp"
#include "riscf/phase_opt.hpp"

namespace riscf {

/// Stage-one utilities: for each (UE, RIS) pair, optimize that RIS's
/// phases for the pair alone and record the reflected-path energy at
/// the optimum. A pair's utility is shared by both sides of the game.
/// The acceptance threshold is rejection_ratio times the direct-channel
/// energy: a RIS whose best reflected contribution stays below it is not
/// worth its channel-acquisition cost to that UE.
///
/// With phase_init_random set, the per-pair optimizer starts from random
/// phases drawn from a stream derived from init_seed and the pair index,
/// so results do not depend on evaluation order.
inline PreferenceTable compute_utilities(const ChannelSet& ch,
                                         const SystemConfig& cfg,
                                         std::uint64_t init_seed = 0) {
  const int num_ues = ch.num_ues();
  const int num_ris = ch.num_ris();
  arma::mat utility(num_ues, num_ris);
  arma::vec threshold(num_ues);
  int iterations_max = 0;

  for (int k = 0; k < num_ues; ++k) {
    threshold(k) =
        cfg.rejection_ratio * std::pow(arma::norm(ch.direct[k], "fro"), 2);
    for (int m = 0; m < num_ris; ++m) {
      const auto op =
          build_cascade(ch.ris_ue[m][k], ch.ap_ris[m], ch.direct[k]);
      const int n = static_cast<int>(op.quad.n_rows);
      arma::cx_vec init(n, arma::fill::ones);
      if (cfg.phase_init_random) {
        Rng rng = Rng::derived(init_seed,
                               {stream::phase_init,
                                static_cast<std::uint64_t>(k * num_ris + m)});
        init = rng.unit_phases(n);
      }
      const auto res = mm_phase_pair(op, init, cfg.mm_tol, cfg.mm_max_iter);
      utility(k, m) = ris_part_power(op, res.phi);
      iterations_max = std::max(iterations_max, res.iterations);
    }
  }

  PreferenceTable table = make_preference_table(utility, threshold);
  table.mm_iterations_max = iterations_max;
  return table;
}

} // namespace riscf
