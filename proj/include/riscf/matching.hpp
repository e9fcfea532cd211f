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

#include <algorithm>
#include <armadillo>
#include <deque>
#include <set>
#include <stdexcept>
#include <vector>

#include "riscf/config.hpp"

namespace riscf {

/// Two-sided preference data for the RIS-UE matching game. utility(k, m)
/// is shared by both sides; preference lists are sorted by descending
/// utility with ties broken by ascending index, which makes the whole
/// game deterministic.
struct PreferenceTable {
  arma::mat utility;            // K x M
  arma::vec threshold;          // per-UE acceptance threshold U_req
  std::vector<std::vector<int>> ue_pref;  // per UE: RIS indices, best first
  std::vector<std::vector<int>> ris_pref; // per RIS: UE indices, best first
  int mm_iterations_max = 0; // largest per-pair optimizer iteration count

  int num_ues() const { return static_cast<int>(utility.n_rows); }
  int num_ris() const { return static_cast<int>(utility.n_cols); }

  /// True iff UE k strictly prefers RIS a over RIS b.
  bool ue_prefers(int k, int a, int b) const {
    const double ua = utility(k, a), ub = utility(k, b);
    return ua > ub || (ua == ub && a < b);
  }

  /// True iff RIS m strictly prefers UE a over UE b.
  bool ris_prefers(int m, int a, int b) const {
    const double ua = utility(a, m), ub = utility(b, m);
    return ua > ub || (ua == ub && a < b);
  }
};

/// Builds sorted preference lists from a raw utility matrix and per-UE
/// thresholds. Used directly by tests with synthetic utilities.
inline PreferenceTable make_preference_table(const arma::mat& utility,
                                             const arma::vec& threshold) {
  PreferenceTable table;
  table.utility = utility;
  table.threshold = threshold;
  const int num_ues = table.num_ues();
  const int num_ris = table.num_ris();
  table.ue_pref.resize(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    auto& pref = table.ue_pref[k];
    pref.resize(num_ris);
    for (int m = 0; m < num_ris; ++m) pref[m] = m;
    std::sort(pref.begin(), pref.end(), [&](int a, int b) {
      return table.ue_prefers(k, a, b);
    });
  }
  table.ris_pref.resize(num_ris);
  for (int m = 0; m < num_ris; ++m) {
    auto& pref = table.ris_pref[m];
    pref.resize(num_ues);
    for (int k = 0; k < num_ues; ++k) pref[k] = k;
    std::sort(pref.begin(), pref.end(), [&](int a, int b) {
      return table.ris_prefers(m, a, b);
    });
  }
  return table;
}

/// A many-to-many matching state: the binary association matrix together
/// with both partner views and the per-UE rejection lists.
struct Association {
  arma::umat c; // M x N_ues, c(m, k) in {0, 1}
  std::vector<std::set<int>> ue_of_ris;  // gamma(m)
  std::vector<std::set<int>> ris_of_ue;  // gamma(k)
  std::vector<std::set<int>> rejected;   // per UE
  int proposals = 0;
  int blocking_resolutions = 0;

  Association() = default;
  Association(int num_ris, int num_ues)
      : c(arma::umat(num_ris, num_ues, arma::fill::zeros)),
        ue_of_ris(num_ris),
        ris_of_ue(num_ues),
        rejected(num_ues) {}

  static Association none(int num_ris, int num_ues) {
    return Association(num_ris, num_ues);
  }

  static Association full(int num_ris, int num_ues) {
    Association a(num_ris, num_ues);
    for (int m = 0; m < num_ris; ++m)
      for (int k = 0; k < num_ues; ++k) a.add(m, k);
    return a;
  }

  int num_ris() const { return static_cast<int>(c.n_rows); }
  int num_ues() const { return static_cast<int>(c.n_cols); }
  bool matched(int m, int k) const { return c(m, k) != 0; }
  int matched_pairs() const { return static_cast<int>(arma::accu(c)); }

  void add(int m, int k) {
    c(m, k) = 1;
    ue_of_ris[m].insert(k);
    ris_of_ue[k].insert(m);
  }

  void remove(int m, int k) {
    c(m, k) = 0;
    ue_of_ris[m].erase(k);
    ris_of_ue[k].erase(m);
  }

  /// Quota and cross-view consistency; used by the instrumented mode of
  /// match() and by the test suites.
  void check_invariants(const SystemConfig& cfg) const {
    for (int m = 0; m < num_ris(); ++m)
      if (static_cast<int>(ue_of_ris[m].size()) > cfg.quota_ue_per_ris)
        throw std::logic_error("RIS quota exceeded");
    for (int k = 0; k < num_ues(); ++k)
      if (static_cast<int>(ris_of_ue[k].size()) > cfg.quota_ris_per_ue)
        throw std::logic_error("UE quota exceeded");
    for (int m = 0; m < num_ris(); ++m)
      for (int k = 0; k < num_ues(); ++k) {
        const bool inm = ue_of_ris[m].count(k) > 0;
        const bool ink = ris_of_ue[k].count(m) > 0;
        if (inm != ink || inm != matched(m, k))
          throw std::logic_error("association views inconsistent");
      }
  }
};

/// (m, k) blocks a matching when the pair is unmatched, each side has a
/// current partner it strictly likes less than the other side, per the
/// swap-matching stability notion.
inline bool is_blocking_pair(const Association& assoc,
                             const PreferenceTable& prefs, int m, int k) {
  if (assoc.matched(m, k)) return false;
  bool ue_gains = false;
  for (int mp : assoc.ris_of_ue[k])
    if (prefs.ue_prefers(k, m, mp)) { ue_gains = true; break; }
  if (!ue_gains) return false;
  for (int kp : assoc.ue_of_ris[m])
    if (prefs.ris_prefers(m, k, kp)) return true;
  return false;
}

namespace detail {

inline int worst_partner_of_ue(const Association& a,
                               const PreferenceTable& prefs, int k) {
  int worst = -1;
  for (int m : a.ris_of_ue[k])
    if (worst < 0 || prefs.ue_prefers(k, worst, m)) worst = m;
  return worst;
}

inline int worst_partner_of_ris(const Association& a,
                                const PreferenceTable& prefs, int m) {
  int worst = -1;
  for (int k : a.ue_of_ris[m])
    if (worst < 0 || prefs.ris_prefers(m, worst, k)) worst = k;
  return worst;
}

} // namespace detail

/// Deferred-acceptance rounds with swap displacement, followed by a
/// blocking-pair resolution pass. UEs propose down their preference
/// lists; a proposal below the UE's threshold puts the RIS on that UE's
/// rejection list (pairs on it are never matched and are excluded from
/// stability). When a quota is full the worst current partner is
/// displaced iff the newcomer is strictly preferred. A crossed pair with
/// both quotas full and both strict preferences is resolved by the double
/// swap: (m,k') and (m',k) leave, (m,k) enters.
inline Association match(const PreferenceTable& prefs,
                         const SystemConfig& cfg,
                         bool verify_invariants = false) {
  const int num_ues = prefs.num_ues();
  const int num_ris = prefs.num_ris();
  Association assoc(num_ris, num_ues);

  std::vector<std::deque<int>> pending(num_ues);
  for (int k = 0; k < num_ues; ++k)
    pending[k].assign(prefs.ue_pref[k].begin(), prefs.ue_pref[k].end());

  bool active = true;
  while (active) {
    active = false;
    for (int k = 0; k < num_ues; ++k) {
      if (pending[k].empty()) continue;
      active = true;
      const int m = pending[k].front();
      pending[k].pop_front();
      ++assoc.proposals;

      const double u = prefs.utility(k, m);
      const bool reject = cfg.printed_rejection_rule
                              ? (u >= prefs.threshold(k))
                              : (u < prefs.threshold(k));
      if (reject) {
        assoc.rejected[k].insert(m);
        continue;
      }

      const int ris_load = static_cast<int>(assoc.ue_of_ris[m].size());
      const int ue_load = static_cast<int>(assoc.ris_of_ue[k].size());
      if (ris_load < cfg.quota_ue_per_ris) {
        if (ue_load < cfg.quota_ris_per_ue) {
          assoc.add(m, k);
        } else {
          const int m_worst = detail::worst_partner_of_ue(assoc, prefs, k);
          if (prefs.ue_prefers(k, m, m_worst)) {
            assoc.remove(m_worst, k);
            assoc.add(m, k);
          }
        }
      } else {
        const int k_worst = detail::worst_partner_of_ris(assoc, prefs, m);
        if (ue_load < cfg.quota_ris_per_ue &&
            prefs.ris_prefers(m, k, k_worst)) {
          assoc.remove(m, k_worst);
          assoc.add(m, k);
        } else if (ue_load > 0) {
          const int m_worst = detail::worst_partner_of_ue(assoc, prefs, k);
          if (prefs.ue_prefers(k, m, m_worst) &&
              prefs.ris_prefers(m, k, k_worst)) {
            assoc.remove(m, k_worst);
            assoc.remove(m_worst, k);
            assoc.add(m, k);
            ++assoc.blocking_resolutions;
          }
        }
      }
      if (verify_invariants) assoc.check_invariants(cfg);
    }
  }

  // Post-pass: resolve remaining blocking pairs among non-rejected pairs.
  // Each double swap replaces two matched utilities by one strictly larger
  // value, so the pass terminates; the cap guards the iteration anyway.
  for (int round = 0; round < num_ues * num_ris; ++round) {
    bool found = false;
    for (int m = 0; m < num_ris && !found; ++m) {
      for (int k = 0; k < num_ues && !found; ++k) {
        if (assoc.rejected[k].count(m)) continue;
        if (!is_blocking_pair(assoc, prefs, m, k)) continue;
        const int k_worst = detail::worst_partner_of_ris(assoc, prefs, m);
        const int m_worst = detail::worst_partner_of_ue(assoc, prefs, k);
        assoc.remove(m, k_worst);
        assoc.remove(m_worst, k);
        assoc.add(m, k);
        ++assoc.blocking_resolutions;
        if (verify_invariants) assoc.check_invariants(cfg);
        found = true;
      }
    }
    if (!found) break;
  }
  return assoc;
}

} // namespace riscf
