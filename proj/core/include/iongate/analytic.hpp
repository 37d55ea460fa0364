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

#include <variant>

#include "iongate/common.hpp"
#include "iongate/hilbert.hpp"

namespace iongate::analytic {

/// Values of the phase-space functions F, G and A at one instant.
///
/// The propagator of H = f(t) J_y x + g(t) J_y p is
///   U(t) = exp(-i A J_y^2) exp(-i F J_y x) exp(-i G J_y p)
/// with F = int f, G = int g and A = -int F g.
struct PhaseSpacePoint {
  double F = 0.0;
  double G = 0.0;
  double A = 0.0;
};

/// Bichromatic drive: a circle traversed at nu - delta.
struct CircularSchedule {
  TrapParams params;
};

/// Alternating constant couplings lambda1 J p, lambda2 J x, -lambda1 J p,
/// -lambda2 J x, each for `segment_time`. Closes a rectangle every cycle.
struct RectangularSchedule {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double segment_time = 1.0;

  double cycle_time() const noexcept { return 4.0 * segment_time; }
  /// J^2 phase accumulated per closed cycle, lambda1 lambda2 segment_time^2.
  double phase_per_cycle() const noexcept { return lambda1 * lambda2 * segment_time * segment_time; }
};

/// lambda1 = lambda2 = 1 with the segment time giving pi/8 per cycle, so
/// four cycles reach the maximally entangling pi/2.
RectangularSchedule default_rectangular_schedule();

using Schedule = std::variant<CircularSchedule, RectangularSchedule>;

/// F, G, A along a schedule, plus the rates f = dF/dt and g = dG/dt.
class PhaseSpaceTrajectory {
 public:
  explicit PhaseSpaceTrajectory(Schedule schedule);

  PhaseSpacePoint at(double t) const;
  double f(double t) const;
  double g(double t) const;

  /// Smallest positive time at which F = G = 0 again.
  double loop_time() const;

  const Schedule& schedule() const noexcept { return schedule_; }

 private:
  Schedule schedule_;
};

/// F, G, A for the bichromatic drive. Throws std::invalid_argument at delta = nu.
PhaseSpacePoint trajectory(const TrapParams& params, double t);

/// Loop count K, duration tau = 2 pi K / (nu - delta) and A(tau).
struct GateSchedule {
  int K = 1;
  double tau = 0.0;
  double target_phase = -kPi / 2.0;
};

GateSchedule gate_schedule(const TrapParams& params, int K);

/// tau = pi sqrt(K) / (eta Omega); in seconds for physical angular
/// frequencies, in 1/nu units for normalized ones.
double gate_time(double eta, double rabi_freq, int K);

/// The Rabi frequency closing K loops with A(tau) = -pi/2:
/// eta Omega / (nu - delta) = 1 / (2 sqrt(K)).
double resonant_rabi_freq(const TrapParams& params, int K);
/// The detuning closing K loops with A(tau) = -pi/2 at the given Omega.
double resonant_detuning(const TrapParams& params, int K);

/// Relative violation of eta Omega / (nu - delta) = 1 / (2 sqrt(K)).
double resonance_mismatch(const TrapParams& params, int K);

/// Two-ion internal density matrix (4x4, register ordering) for an initial
/// |gg> (x) thermal state under the x-p Hamiltonian, from the closed-form
/// Laguerre-weighted sums. Throws std::invalid_argument unless N = 2.
CMatrix density_elements(const TrapParams& params, double t,
                         const hilbert::ThermalDistribution& dist);

/// EPR population <psi|rho|psi> with psi = (|gg> - i|ee>)/sqrt(2).
double epr_population(const CMatrix& rho_spin);

/// U(t) |state> built from matrix exponentials of the truncated x and p.
/// Throws TruncationError if more than 1e-6 of the probability ends up in
/// the top 10% of the Fock levels.
hilbert::StateVector apply_propagator(const TrapParams& params, double t,
                                      const hilbert::StateVector& state);
hilbert::StateVector apply_propagator(const PhaseSpacePoint& point,
                                      const hilbert::StateVector& state);

/// Collective axis coupled to the oscillator by the stroboscopic sequence.
enum class SpinAxis { X, Y, Z };

/// n_cycles repetitions of
///   exp(i H2 s) exp(i H1 s) exp(-i H2 s) exp(-i H1 s),
/// H1 = lambda1 J p, H2 = lambda2 J x, s = segment_time, applied to `state`.
/// Each cycle equals exp(-i lambda1 lambda2 s^2 J^2).
hilbert::StateVector stroboscopic_propagator(double lambda1, double lambda2, double segment_time,
                                             int n_cycles, const hilbert::StateVector& state,
                                             SpinAxis axis = SpinAxis::Y);

/// The three exponents of the order-eta^6 propagator at tau = 2 pi K/(nu - delta):
///   exp(-i jy2_phase J_y^2) exp(+i jy3x_coeff J_y^3 x) exp(-i jy4_coeff J_y^4).
struct U6Corrections {
  double jy2_phase = 0.0;   // Omega~ tau [1 - eta^2 (2n+1) + eta^4 (5n^2/4 + 5n/4 + 1/2)]
  double jy3x_coeff = 0.0;  // eta^5 sqrt(8) Omega^3 tau / (nu - delta)^2
  double jy4_coeff = 0.0;   // eta^6 5 Omega^4 tau / (2 (nu - delta)^3)
};

U6Corrections strong_field_correction_u6(const TrapParams& params, int K, int n);

/// Exponents of the eta^3 propagator
///   exp(-i c1 J_y h1(x,p)) exp(-i c2 J_y h2(x,p)),
/// c1 = kappa sin((nu-delta)t)/(nu-delta), c2 = kappa (1 - cos((nu-delta)t))/(nu-delta),
/// kappa = sqrt(2) eta^3 Omega / 12.
struct U3Exponents {
  double h1_coeff = 0.0;
  double h2_coeff = 0.0;
};

U3Exponents u3_exponents(const TrapParams& params, double t);

/// exp(-i c1 J_y h1) exp(-i c2 J_y h2) |state>, with
/// h1 = 3x^3 + x p^2 + p x p + p^2 x and h2 = 3p^3 + p x^2 + x p x + x^2 p
/// built on the truncated oscillator.
hilbert::StateVector apply_u3(const TrapParams& params, double t, const hilbert::StateVector& state);

}  // namespace iongate::analytic
