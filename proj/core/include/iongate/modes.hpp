// Copyright 2026 The iongate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>

#include "iongate/common.hpp"

namespace iongate::modes {

inline constexpr int kMinIons = 2;
inline constexpr int kMaxIons = 10;

/// Axial normal modes of an N-ion string in a harmonic trap.
///
/// Positions are in units of the length l = (e^2 / (4 pi eps0 M nu^2))^(1/3).
/// Column l of `vectors` is mode l; modes are ordered by ascending frequency
/// and the first nonzero component of each vector is positive.
struct ModeSpectrum {
  int n_ions = 0;
  RVector positions;   // equilibrium positions, ascending
  RVector freqs;       // nu_l / nu
  RMatrix vectors;     // b_i^l, row i = ion, column l = mode
  double force_residual = 0.0;

  /// eta_{i,l} = eta sqrt(N) b_i^l / sqrt(nu_l / nu).
  RMatrix lamb_dicke_matrix(double eta) const;
};

/// Damped Newton solve of u_m - sum_{n<m} 1/(u_m-u_n)^2 + sum_{n>m} 1/(u_m-u_n)^2 = 0,
/// then diagonalization of the Hessian A_mm = 1 + 2 sum 1/|u_m-u_n|^3,
/// A_mn = -2/|u_m-u_n|^3. Throws ConvergenceError if the force residual does
/// not reach 1e-12.
ModeSpectrum solve_chain(int n_ions);

/// The six thermal-bound sums, with r_l = nu_l / nu and
/// w_ll' = sum_i (b_i^l)^2 (b_i^l')^2 - 1/N:
///   sigma1 = sum_{l>=2} (2/r^2) (r^2+1)/(r^2-1)^2
///   sigma2 = sum_{l>=2} (1/r)   (r^2+1)/(r^2-1)^2
///   sigma3 = sum_l 1/r^4
///   sigma4 = sum_l 1/r^3
///   sigma5 = sum_{l!=l'} w_ll' / (r_l r_l')^2 + sum_l 2 w_ll / r_l^4
///   sigma6 = sum_l w_ll / r_l^3
/// The diagonal terms take <n_l^2> = 2 nbar_l^2 + nbar_l for a thermal mode.
struct ModeSums {
  std::array<double, 6> sigma{};

  double operator[](int k) const { return sigma.at(k - 1); }  // 1-based, as sigma_k
};

ModeSums sigma_sums(const ModeSpectrum& spectrum);

}  // namespace iongate::modes
