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

#include <functional>
#include <vector>

#include "iongate/analytic.hpp"
#include "iongate/common.hpp"
#include "iongate/hilbert.hpp"

namespace iongate::dynamics {

/// Which interaction-picture Hamiltonian the integrator solves.
///
///   Full          Omega cos(delta t) (S+ D_I(t) + S- D_I(t)^dag), D = exp(i eta (a + a^dag))
///                 from exact matrix elements
///   NonLambDicke  2 Omega cos(delta t) [J_x cos(sqrt2 eta x_I) - J_y sin(sqrt2 eta x_I)],
///                 x_I = x cos(nu t) + p sin(nu t), functions of the truncated x
///   RwaLambDicke  2 Omega J_x cos(delta t) - sqrt2 eta Omega J_y [x (cos(nu-delta)t + cos(nu+delta)t)
///                 + p (sin(nu-delta)t + sin(nu+delta)t)]
///   XP            -sqrt2 eta Omega J_y [x cos(nu-delta)t + p sin(nu-delta)t]
enum class Variant { Full, NonLambDicke, RwaLambDicke, XP };

const char* to_string(Variant v) noexcept;

struct HamiltonianSpec {
  Variant variant = Variant::Full;
  TrapParams params;
};

/// Thermal reservoir coupling: C1 = sqrt(gamma (1 + n_thermal)) a, C2 = sqrt(gamma n_thermal) a^dag.
struct HeatingParams {
  double gamma = 0.0;
  double n_thermal = 0.0;

  /// Throws std::invalid_argument for negative entries.
  void validate() const;
};

/// H_I(t) on (register) x (Fock window), in the frame rotating with nu a^dag a.
///
/// Every variant has the form R(t) [cos(delta t) Vc + sin(delta t) Vs] R(t)^dag with
/// R(t) = exp(i nu a^dag a t), so the lab-frame problem is periodic in 2 pi / delta.
///
/// With SpinSector::Symmetric the register is restricted to the N+1 Dicke
/// states of hilbert::dicke_basis, which every variant leaves invariant.
enum class SpinSector { Full, Symmetric };

class Hamiltonian {
 public:
  Hamiltonian(const HamiltonianSpec& spec, const hilbert::FockSpace& fock,
              SpinSector sector = SpinSector::Full);

  int dim() const noexcept { return dim_; }
  int spin_dim() const noexcept { return spin_dim_; }
  SpinSector sector() const noexcept { return sector_; }
  int n_ions() const noexcept { return n_ions_; }
  const hilbert::FockSpace& fock() const noexcept { return fock_; }
  const HamiltonianSpec& spec() const noexcept { return spec_; }

  /// out = H_I(t) x for a block of column vectors.
  void apply(double t, const CMatrix& x, CMatrix& out) const;
  CMatrix dense(double t) const;

  /// Fastest frequency the step rule resolves.
  double max_frequency() const noexcept;
  /// (1/200) of the period of max_frequency().
  double default_step() const noexcept;
  /// Period of the lab-frame Hamiltonian, 2 pi / delta.
  double period() const noexcept;
  /// Diagonal of R(t) on the product basis.
  CVector frame_phases(double t) const;

 private:
  HamiltonianSpec spec_;
  hilbert::FockSpace fock_;
  SpinSector sector_;
  int n_ions_;
  int spin_dim_;
  int dim_;
  SparseOp vc_, vs_;
  bool has_vs_ = false;
  RVector fock_index_;  // level offset of each product-basis row
};

/// The gate compares the run at h with one at 2h (step doubling); while they
/// differ by more than `tolerance` the step is halved and the comparison repeated.
struct IntegratorOptions {
  double step = 0.0;                   // 0 selects Hamiltonian::default_step()
  bool convergence_gate = true;
  double tolerance = 1e-6;             // on the monitored internal density matrix
  int max_refinements = 4;
  double norm_tolerance = 1e-6;
  double truncation_tolerance = 1e-6;  // probability allowed into the Fock guard band
};

/// Diagnostics common to every run.
struct RunReport {
  double step = 0.0;            // accepted step
  int refinements = 0;          // halvings beyond the initial step
  double gate_change = 0.0;     // change of the monitored observable at the last halving
  double max_norm_drift = 0.0;
  double max_edge_mass = 0.0;
};

using StateObserver = std::function<void(double t, const hilbert::StateVector&)>;

struct SchrodingerTrace {
  std::vector<double> times;
  std::vector<hilbert::StateVector> states;
  RunReport report;
};

/// Integrates i d/dt psi = H_I(t) psi from t = 0 and records psi at `times`
/// (ascending, >= 0). Throws StepFailure if the gate does not converge and
/// TruncationError if probability leaks into the guard band.
SchrodingerTrace evolve_schrodinger(const HamiltonianSpec& spec, const hilbert::StateVector& state,
                                    const std::vector<double>& times,
                                    const IntegratorOptions& options = {});

/// Same integration, streaming each sample to `observer` instead of storing it.
RunReport evolve_schrodinger(const HamiltonianSpec& spec, const hilbert::StateVector& state,
                             const std::vector<double>& times, const StateObserver& observer,
                             const IntegratorOptions& options = {});

/// Incoherent mixture |spin> (x) |n> with weight P_n, each member evolved as a pure state.
struct EnsembleOptions {
  IntegratorOptions integrator;
  int initial_spin = 0;           // register basis index; 0 is |g...g>
  double ensemble_tail = 1e-8;    // initial weight that may be dropped from the top
  int margin = -1;                // Fock levels above the highest kept level; -1 chooses
  int max_widenings = 3;          // margin doublings tried before TruncationError
  bool symmetric_subspace = true; // use the Dicke sector when the initial spin state lies in it
  enum class Method { Auto, Direct, Periodic } method = Method::Auto;
};

struct EnsembleTrace {
  std::vector<double> times;
  std::vector<CMatrix> spin;      // weighted internal density matrix per sample
  std::vector<RVector> fock_pops; // weighted Fock populations per sample
  hilbert::FockSpace fock{1};
  int highest_level = 0;          // largest initial n kept
  double dropped_weight = 0.0;    // initial weight left out; bounds the error of any
                                  // observable with norm <= 1 by twice this
  bool periodic = false;
  RunReport report;
};

EnsembleTrace evolve_ensemble(const HamiltonianSpec& spec, const std::vector<double>& weights,
                              const std::vector<double>& times, const EnsembleOptions& options = {});

/// Thermal occupation with mean `mean_n`, cut where the thermal tail mass is
/// below options.ensemble_tail.
EnsembleTrace evolve_thermal(const HamiltonianSpec& spec, double mean_n,
                             const std::vector<double>& times, const EnsembleOptions& options = {});

using DensityObserver = std::function<void(double t, const hilbert::DensityOperator&)>;

struct LindbladOptions {
  IntegratorOptions integrator;
  double positivity_tolerance = 1e-6;  // smallest eigenvalue allowed is -tolerance
  double trace_tolerance = 1e-6;
};

struct LindbladTrace {
  std::vector<double> times;
  std::vector<hilbert::DensityOperator> states;
  RunReport report;  // max_norm_drift holds the trace drift
};

/// Integrates d rho/dt = -i[H_I(t), rho] + sum_m C_m rho C_m^dag - {C_m^dag C_m, rho}/2
/// directly on the full density operator. The dissipator is unchanged by the
/// rotation R(t), so no approximation enters through the frame.
/// Without an explicit step the default step is also held below 1/20 of the
/// shortest decay time of the dissipator.
LindbladTrace evolve_lindblad(const HamiltonianSpec& spec, const HeatingParams& heating,
                              const hilbert::DensityOperator& rho, const std::vector<double>& times,
                              const LindbladOptions& options = {});

RunReport evolve_lindblad(const HamiltonianSpec& spec, const HeatingParams& heating,
                          const hilbert::DensityOperator& rho, const std::vector<double>& times,
                          const DensityObserver& observer, const LindbladOptions& options = {});

/// Decay of the J_y-basis coherence rho_{M, M'} with M - M' = delta_m:
/// exp(-delta_m^2 gamma (1 + 2 n_th) / 4 * int_0^t (F^2 + G^2) dt').
double dephasing_factor(const HeatingParams& heating, const analytic::PhaseSpaceTrajectory& path,
                        double t, double delta_m);

/// The same factor at a closure time tau = 2 pi K / (nu - delta) with the
/// resonance condition met: exp(-delta_m^2 gamma (1 + 2 n_th) tau / (4 K)).
double dephasing_factor_at_closure(const HeatingParams& heating, int K, double tau, double delta_m);

}  // namespace iongate::dynamics
