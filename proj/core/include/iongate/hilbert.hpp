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

#include <vector>

#include "iongate/common.hpp"

namespace iongate::hilbert {

inline constexpr int kMaxIons = 10;
inline constexpr double kTailTolerance = 1e-8;

/// Spin-1/2 generators for an N-ion register.
///
/// Register index bit k holds ion k, with 0 = |g> and 1 = |e>. In the
/// (|e>, |g>) ordering sigma_y = [[0, -i], [i, 0]]; sigma_plus = |e><g|.
struct SpinOperatorSet {
  struct Ion {
    SparseOp jx, jy, jz;
  };

  int n_ions = 0;
  SparseOp jx, jy, jz;
  SparseOp raising;   // sum_k sigma_plus_k
  SparseOp lowering;  // sum_k sigma_minus_k
  std::vector<Ion> ions;

  int dim() const noexcept { return 1 << n_ions; }
};

SpinOperatorSet build_spin_ops(int n_ions);

/// Orthonormal basis of the permutation-symmetric register states: column k
/// is the normalized sum of all states with k ions excited (k = 0 is |g...g>).
RMatrix dicke_basis(int n_ions);

/// Contiguous block of Fock levels [floor, cutoff] of one oscillator mode.
///
/// A nonzero floor gives a window used by the ensemble integrator; the top
/// level is the truncation point.
class FockSpace {
 public:
  explicit FockSpace(int cutoff, int floor = 0);

  int cutoff() const noexcept { return cutoff_; }
  int floor() const noexcept { return floor_; }
  int size() const noexcept { return cutoff_ - floor_ + 1; }
  bool contains(int n) const noexcept { return n >= floor_ && n <= cutoff_; }

  RMatrix lowering() const;
  RMatrix position() const;   // (a + a^dag)/sqrt(2)
  CMatrix momentum() const;   // i (a^dag - a)/sqrt(2)

  /// Levels in the top 10% of the window (at least one).
  int guard_levels() const noexcept;

  bool operator==(const FockSpace&) const = default;

 private:
  int cutoff_;
  int floor_;
};

/// <n| D(alpha) |m> for the displacement D(alpha) = exp(alpha a^dag - conj(alpha) a).
cplx displacement_element(int n, int m, cplx alpha);

/// <n| exp(i eta (a + a^dag)) |m>, any |n - m|.
cplx displacement_element(int n, int m, double eta);

/// Exact D(alpha) matrix elements restricted to the levels of `fock`.
CMatrix displacement_matrix(const FockSpace& fock, cplx alpha);

/// Truncated thermal occupation P_n = nbar^n / (nbar + 1)^(n + 1).
struct ThermalDistribution {
  double mean_n = 0.0;         // requested nbar
  std::vector<double> probs;   // renormalized over 0..cutoff
  double tail_mass = 0.0;      // weight discarded above the cutoff
  double mean = 0.0;           // sum n P_n over the kept levels
  double variance = 0.0;

  int cutoff() const noexcept { return static_cast<int>(probs.size()) - 1; }
};

/// Throws std::invalid_argument if the discarded tail is >= 1e-8.
ThermalDistribution thermal_dist(double mean_n, int cutoff);

/// Smallest cutoff whose thermal tail mass is below `tail`.
int thermal_cutoff(double mean_n, double tail = kTailTolerance);

/// Fock cutoff for a gate run: thermal tail below 1e-8 and room for the
/// largest phase-space excursion N eta Omega / (nu - delta).
int choose_cutoff(const TrapParams& params, double mean_n);

/// Pure state on (register) x (Fock window). Register index varies fastest:
/// basis index = spin + 2^N * (n - floor).
class StateVector {
 public:
  StateVector(int n_ions, FockSpace fock);
  StateVector(int n_ions, FockSpace fock, CVector amplitudes);

  /// |spin> (x) |n>.
  static StateVector basis(int n_ions, const FockSpace& fock, int spin, int n);

  int n_ions() const noexcept { return n_ions_; }
  int spin_dim() const noexcept { return 1 << n_ions_; }
  const FockSpace& fock() const noexcept { return fock_; }
  int dim() const noexcept { return static_cast<int>(amp_.size()); }

  const CVector& amplitudes() const noexcept { return amp_; }
  CVector& amplitudes() noexcept { return amp_; }

  /// Amplitudes viewed as a (2^N x levels) matrix.
  Eigen::Map<const CMatrix> as_matrix() const;
  Eigen::Map<CMatrix> as_matrix();

  double norm() const { return amp_.norm(); }

  /// Internal-state density matrix after tracing out the oscillator.
  CMatrix reduced_spin() const;
  /// Populations of the Fock levels of the window.
  RVector fock_populations() const;

  /// Probability in the guard band at the top (and bottom, for windows
  /// above n = 0) of the Fock window.
  double edge_mass() const;

 private:
  int n_ions_;
  FockSpace fock_;
  CVector amp_;
};

/// Mixed state on the same product basis as StateVector.
class DensityOperator {
 public:
  DensityOperator(int n_ions, FockSpace fock);
  DensityOperator(int n_ions, FockSpace fock, CMatrix rho);

  /// |g...g><g...g| (x) sum_n P_n |n><n|.
  static DensityOperator ground_spins_thermal(int n_ions, const FockSpace& fock,
                                              const ThermalDistribution& dist);

  int n_ions() const noexcept { return n_ions_; }
  int spin_dim() const noexcept { return 1 << n_ions_; }
  const FockSpace& fock() const noexcept { return fock_; }
  int dim() const noexcept { return static_cast<int>(rho_.rows()); }

  const CMatrix& matrix() const noexcept { return rho_; }
  CMatrix& matrix() noexcept { return rho_; }

  CMatrix reduced_spin() const;
  RVector fock_populations() const;
  double edge_mass() const;

 private:
  int n_ions_;
  FockSpace fock_;
  CMatrix rho_;
};

/// (|g...g> - i|e...e>)/sqrt(2) on the register.
CVector ghz_target(int n_ions);

/// <target| rho_spin |target> for the state above.
double ghz_fidelity(const CMatrix& rho_spin);

}  // namespace iongate::hilbert
