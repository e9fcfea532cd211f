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
#include <cstdint>
#include <initializer_list>
#include <random>

namespace riscf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from a base seed and a tag list.
/// All randomness in a run funnels through one user seed; every consumer
/// (topology, channels, CSI error, per-drop streams, ...) gets its own
/// derived stream so that adding or removing one consumer never shifts
/// the draws seen by another.
inline std::uint64_t mix_seed(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = seed;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t t : tags) {
    s ^= t + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
    out = splitmix64(s);
  }
  return out;
}

namespace stream {
// Substream tags.
constexpr std::uint64_t topology = 0x11;
constexpr std::uint64_t channels = 0x22;
constexpr std::uint64_t csi = 0x33;
constexpr std::uint64_t phase_init = 0x44;
constexpr std::uint64_t random_phase = 0x55;
constexpr std::uint64_t drop = 0x66;
} // namespace stream

/// Seeded random source. Deterministic for a fixed (seed, draw-order).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derived(std::uint64_t seed,
                     std::initializer_list<std::uint64_t> tags) {
    return Rng(mix_seed(seed, tags));
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
  }

  std::uint64_t integer() { return engine_(); }

  /// One draw of a circularly-symmetric complex Gaussian, unit variance.
  arma::cx_double cgauss() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return arma::cx_double(re * inv_sqrt2, im * inv_sqrt2);
  }

  /// Matrix with i.i.d. CN(0,1) entries, filled in column-major order.
  arma::cx_mat cgauss_mat(arma::uword rows, arma::uword cols) {
    arma::cx_mat out(rows, cols);
    for (arma::uword i = 0; i < out.n_elem; ++i) out(i) = cgauss();
    return out;
  }

  arma::cx_vec cgauss_vec(arma::uword n) {
    arma::cx_vec out(n);
    for (arma::uword i = 0; i < n; ++i) out(i) = cgauss();
    return out;
  }

  /// Vector of unit-modulus entries with phases uniform in [0, 2*pi).
  arma::cx_vec unit_phases(arma::uword n) {
    arma::cx_vec out(n);
    for (arma::uword i = 0; i < n; ++i) {
      const double theta = uniform(0.0, 2.0 * arma::datum::pi);
      out(i) = std::polar(1.0, theta);
    }
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

} // namespace riscf
