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

#include <stdexcept>
#include <string>
#include <vector>

#include "iongate/common.hpp"
#include "iongate/dynamics.hpp"
#include "iongate/hilbert.hpp"
#include "iongate/modes.hpp"

namespace iongate::fidelity {

/// Inputs that are individually valid but contradict each other.
class InconsistentInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Effective two-photon Rabi frequency for |gg n> <-> |ee n>.
///
/// base = -(Omega eta)^2 / (nu - delta). The n-dependent value is
/// base * exp(-eta^2) [L1_n(eta^2)^2/(n+1) - L1_{n-1}(eta^2)^2/n], with the
/// series 1 - eta^2 (2n+1) + eta^4 (5n^2/4 + 5n/4 + 1/2) as its expansion.
/// With `include_far_sidebands` every value is multiplied by 2 nu/(nu + delta),
/// which adds the paths through the sidebands detuned by nu + delta.
struct EffectiveRabi {
  double base = 0.0;
  int n = 0;
  double exact_ratio = 1.0;
  double series_ratio = 1.0;
  double exact = 0.0;   // base * exact_ratio * correction
  double series = 0.0;  // base * series_ratio * correction
};

EffectiveRabi effective_rabi(const TrapParams& params, int n, bool include_far_sidebands = false);

/// L_n^alpha(x).
double laguerre(int n, int alpha, double x);

/// Off-resonant carrier coupling 2 Omega J_x cos(delta t).
struct CarrierFidelity {
  double instantaneous = 1.0;  // 1 - N Omega^2 (1 - cos 2 delta tau) / (2 delta^2)
  double average_loss = 0.0;   // N Omega^2 / (2 delta^2)
};

CarrierFidelity carrier_fidelity(const TrapParams& params, int n_ions, double tau);

struct LambDickeOptions {
  bool include_far_sidebands = false;
};

/// Fidelity of the GHZ state when the J_y^2 rate depends on n.
struct LambDickeFidelity {
  double exact = 0.0;          // sum_n P_n |2^-N sum_k C(N,k) e^{i(N/2-k)^2 (pi/2 - |W_n| t)}|^2
  double two_ion = 0.0;        // 1/2 + 1/2 sum_n P_n sin(|W_n| t); equals `exact` for N = 2
  double gaussian = 0.0;       // sum_n P_n / sqrt(1 + N(N-1)(pi/2 - |W_n| t)^2 / 4)
  double lowest_order = 0.0;   // 1 - pi^2 N (N-1) eta^4 Var(n) / 8
  double tau_opt = 0.0;        // pi (1 + eta^2 (2 nbar + 1)) / (2 |base|)
};

LambDickeFidelity lamb_dicke_fidelity(const TrapParams& params, int n_ions,
                                      const hilbert::ThermalDistribution& dist, double t,
                                      const LambDickeOptions& options = {});

/// Time in [t_lo, t_hi] maximizing LambDickeFidelity::exact, with its value.
struct Optimum {
  double time = 0.0;
  double fidelity = 0.0;
};

Optimum optimum_time(const TrapParams& params, int n_ions, const hilbert::ThermalDistribution& dist,
                     double t_lo, double t_hi, const LambDickeOptions& options = {});

/// Mean occupations nbar_l = nbar_1 nu / nu_l of a thermal string.
std::vector<double> thermal_occupations(const modes::ModeSpectrum& spectrum, double nbar1);

/// Losses (1 - F) from the modes other than the centre of mass.
struct SpectatorLosses {
  double direct = 0.0;             // mode sum with the given occupations
  double direct_bound = 0.0;       // N eta^2 Omega^2/nu^2 (nbar1 sigma1 + sigma2)
  double direct_large_n = 0.0;     // N eta^2 Omega^2/nu^2 0.8 (nbar1 + 1)
  double debye_waller = 0.0;       // mode sum with thermal moments, including the l = 1 term
  double debye_waller_bound = 0.0; // sigma3..sigma6 form
  double debye_waller_large_n = 0.0;  // pi^2 N(N-1)/8 eta^4 (1.2 nbar1^2 + 1.4 nbar1)
};

/// `occupations` lists nbar_l per mode (ascending frequency); the bounds use
/// occupations[0] as nbar_1. Thermal moments are assumed for every mode.
SpectatorLosses spectator_fidelity(const modes::ModeSpectrum& spectrum, const TrapParams& params,
                                   const std::vector<double>& occupations);

/// Internal-state fidelity under J_y dephasing from reservoir heating.
struct HeatingFidelity {
  double x = 0.0;          // gamma (1 + 2 n_th) tau / (4 K)
  double exact = 1.0;      // 2^-2N sum_jk C(N,j) C(N,k) e^{-(j-k)^2 x}
  double two_ion = 1.0;    // 3/8 + e^{-x}/2 + e^{-4x}/8
  double many_ion = 1.0;   // 1 / sqrt(1 + N x)
};

HeatingFidelity heating_fidelity(const dynamics::HeatingParams& heating, int n_ions, int K,
                                 double tau);

struct BudgetOptions {
  bool carrier = true;
  bool lamb_dicke = true;
  bool spectator_direct = true;
  bool debye_waller = true;
  bool heating = true;
  double resonance_tolerance = 0.01;
};

/// Itemized loss budget for an N-ion GHZ preparation in K loops.
struct FidelityReport {
  struct Term {
    std::string key;
    double loss = 0.0;
    std::string formula;
  };

  double carrier = 0.0;
  double lamb_dicke = 0.0;
  double spectator_direct = 0.0;
  double debye_waller = 0.0;
  double heating = 0.0;
  double total = 1.0;  // 1 - sum of losses, clamped to [0, 1]

  /// Mode-sum versions of the two spectator columns, for comparison.
  double spectator_direct_sum = 0.0;
  double debye_waller_sum = 0.0;

  int n_ions = 0;
  int K = 0;
  double tau = 0.0;

  std::vector<Term> terms() const;
};

/// Throws InconsistentInput if eta Omega/(nu - delta) misses 1/(2 sqrt K) by
/// more than options.resonance_tolerance (relative). `spectrum` must match
/// params.n_ions when n_ions >= 2; it is ignored for a single ion.
FidelityReport budget(const TrapParams& params, const modes::ModeSpectrum& spectrum, double nbar1,
                      const dynamics::HeatingParams& heating, int K,
                      const BudgetOptions& options = {});

}  // namespace iongate::fidelity
