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

#include "iongate/analytic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "iongate/special.hpp"
#include "linalg.hpp"

namespace iongate::analytic {
namespace {

using hilbert::FockSpace;
using hilbert::StateVector;

constexpr double kGuardTolerance = 1e-6;

void require_offresonant(const TrapParams& p) {
  if (p.sideband_gap() == 0.0) throw std::invalid_argument("trajectory: delta equals nu");
}

// Eigen-decomposition of a collective spin component, grouped by eigenvalue.
struct SpinEigenbasis {
  CMatrix vectors;                          // columns are eigenvectors
  std::map<int, std::vector<int>> by_twice_m;  // 2m -> column indices
};

SpinEigenbasis spin_eigenbasis(int n_ions, SpinAxis axis) {
  const auto ops = hilbert::build_spin_ops(n_ions);
  const SparseOp& j = axis == SpinAxis::X ? ops.jx : axis == SpinAxis::Y ? ops.jy : ops.jz;
  const detail::HermitianExp eig{CMatrix(j)};
  SpinEigenbasis out;
  out.vectors = eig.eigenvectors();
  for (int k = 0; k < eig.eigenvalues().size(); ++k)
    out.by_twice_m[static_cast<int>(std::lround(2.0 * eig.eigenvalues()(k)))].push_back(k);
  return out;
}

// Applies a motional operator E_m (chosen per spin eigenvalue m) to the state.
template <typename MotionalOp>
StateVector apply_spin_conditioned(const StateVector& state, SpinAxis axis, MotionalOp&& op) {
  const SpinEigenbasis basis = spin_eigenbasis(state.n_ions(), axis);
  CMatrix psi = basis.vectors.adjoint() * state.as_matrix();  // spin eigenbasis x Fock
  for (const auto& [twice_m, rows] : basis.by_twice_m) {
    const CMatrix e = op(0.5 * twice_m);
    for (int r : rows) psi.row(r) = (e * psi.row(r).transpose()).transpose();
  }
  StateVector out(state.n_ions(), state.fock());
  out.as_matrix() = basis.vectors * psi;
  const double pushed = out.edge_mass() - state.edge_mass();
  if (pushed > kGuardTolerance)
    throw TruncationError("displacement pushed " + std::to_string(pushed) +
                          " probability into the Fock guard band");
  return out;
}

// exp(-i theta x) and exp(-i theta p) on a truncated window, both from the
// spectrum of x. p = R x R^dag with R = diag(i^(n - floor)).
class QuadratureExp {
 public:
  explicit QuadratureExp(const FockSpace& fock)
      : x_(CMatrix(fock.position().cast<cplx>())), r_(fock.size()) {
    for (int k = 0; k < fock.size(); ++k) r_(k) = std::pow(kI, k % 4);
  }

  CMatrix x(double theta) const { return x_(theta); }
  CMatrix p(double theta) const {
    return r_.asDiagonal() * x_(theta) * r_.conjugate().asDiagonal();
  }

 private:
  detail::HermitianExp x_;
  CVector r_;
};

}  // namespace

RectangularSchedule default_rectangular_schedule() {
  return {1.0, 1.0, std::sqrt(kPi / 8.0)};
}

PhaseSpaceTrajectory::PhaseSpaceTrajectory(Schedule schedule) : schedule_(std::move(schedule)) {
  if (const auto* c = std::get_if<CircularSchedule>(&schedule_)) require_offresonant(c->params);
  if (const auto* r = std::get_if<RectangularSchedule>(&schedule_); r && !(r->segment_time > 0.0))
    throw std::invalid_argument("RectangularSchedule: segment_time must be > 0");
}

PhaseSpacePoint PhaseSpaceTrajectory::at(double t) const {
  if (const auto* c = std::get_if<CircularSchedule>(&schedule_)) return trajectory(c->params, t);
  const auto& r = std::get<RectangularSchedule>(schedule_);
  const double s = r.segment_time;
  const double cycles = std::floor(t / r.cycle_time());
  const double u = t - cycles * r.cycle_time();
  const int seg = std::min(3, static_cast<int>(u / s));
  const double v = u - seg * s;
  const double l1 = r.lambda1, l2 = r.lambda2;
  PhaseSpacePoint pt;
  switch (seg) {
    case 0: pt = {0.0, l1 * v, 0.0}; break;
    case 1: pt = {l2 * v, l1 * s, 0.0}; break;
    case 2: pt = {l2 * s, l1 * (s - v), l1 * l2 * s * v}; break;
    default: pt = {l2 * (s - v), 0.0, l1 * l2 * s * s}; break;
  }
  pt.A += cycles * r.phase_per_cycle();
  return pt;
}

double PhaseSpaceTrajectory::f(double t) const {
  if (const auto* c = std::get_if<CircularSchedule>(&schedule_)) {
    const auto& p = c->params;
    return -std::sqrt(2.0) * p.lamb_dicke * p.rabi_freq * std::cos(p.sideband_gap() * t);
  }
  const auto& r = std::get<RectangularSchedule>(schedule_);
  const double u = t - std::floor(t / r.cycle_time()) * r.cycle_time();
  const int seg = std::min(3, static_cast<int>(u / r.segment_time));
  return seg == 1 ? r.lambda2 : seg == 3 ? -r.lambda2 : 0.0;
}

double PhaseSpaceTrajectory::g(double t) const {
  if (const auto* c = std::get_if<CircularSchedule>(&schedule_)) {
    const auto& p = c->params;
    return -std::sqrt(2.0) * p.lamb_dicke * p.rabi_freq * std::sin(p.sideband_gap() * t);
  }
  const auto& r = std::get<RectangularSchedule>(schedule_);
  const double u = t - std::floor(t / r.cycle_time()) * r.cycle_time();
  const int seg = std::min(3, static_cast<int>(u / r.segment_time));
  return seg == 0 ? r.lambda1 : seg == 2 ? -r.lambda1 : 0.0;
}

double PhaseSpaceTrajectory::loop_time() const {
  if (const auto* c = std::get_if<CircularSchedule>(&schedule_))
    return 2.0 * kPi / std::abs(c->params.sideband_gap());
  return std::get<RectangularSchedule>(schedule_).cycle_time();
}

PhaseSpacePoint trajectory(const TrapParams& params, double t) {
  require_offresonant(params);
  const double w = params.sideband_gap();
  const double c = std::sqrt(2.0) * params.lamb_dicke * params.rabi_freq / w;
  const double eo = params.lamb_dicke * params.rabi_freq;
  return {-c * std::sin(w * t), -c * (1.0 - std::cos(w * t)),
          -(eo * eo / w) * (t - std::sin(2.0 * w * t) / (2.0 * w))};
}

GateSchedule gate_schedule(const TrapParams& params, int K) {
  if (K < 1) throw std::invalid_argument("gate_schedule: K must be >= 1");
  require_offresonant(params);
  GateSchedule g;
  g.K = K;
  g.tau = 2.0 * kPi * K / params.sideband_gap();
  g.target_phase = trajectory(params, g.tau).A;
  return g;
}

double gate_time(double eta, double rabi_freq, int K) {
  if (!(eta > 0.0) || !(rabi_freq > 0.0) || K < 1)
    throw std::invalid_argument("gate_time: eta, rabi_freq and K must be positive");
  return kPi * std::sqrt(static_cast<double>(K)) / (eta * rabi_freq);
}

double resonant_rabi_freq(const TrapParams& params, int K) {
  if (K < 1) throw std::invalid_argument("resonant_rabi_freq: K must be >= 1");
  return params.sideband_gap() / (2.0 * std::sqrt(static_cast<double>(K)) * params.lamb_dicke);
}

double resonant_detuning(const TrapParams& params, int K) {
  if (K < 1) throw std::invalid_argument("resonant_detuning: K must be >= 1");
  return params.trap_freq -
         2.0 * std::sqrt(static_cast<double>(K)) * params.lamb_dicke * params.rabi_freq;
}

double resonance_mismatch(const TrapParams& params, int K) {
  require_offresonant(params);
  const double ratio = params.lamb_dicke * params.rabi_freq / params.sideband_gap();
  return std::abs(ratio * 2.0 * std::sqrt(static_cast<double>(K)) - 1.0);
}

CMatrix density_elements(const TrapParams& params, double t,
                         const hilbert::ThermalDistribution& dist) {
  if (params.n_ions != 2) throw std::invalid_argument("density_elements: requires n_ions == 2");
  const PhaseSpacePoint pt = trajectory(params, t);
  const double r2 = pt.F * pt.F + pt.G * pt.G;
  const double e1 = std::exp(-r2 / 4.0), e2 = std::exp(-r2);
  const double phase = pt.A + pt.F * pt.G / 2.0;
  double s1 = 0.0, s2 = 0.0;  // thermal averages of L_n(r2/2), L_n(2 r2)
  for (int n = 0; n <= dist.cutoff(); ++n) {
    s1 += dist.probs[n] * special::laguerre(n, 0, r2 / 2.0);
    s2 += dist.probs[n] * special::laguerre(n, 0, 2.0 * r2);
  }
  const double gg = 3.0 / 8.0 + 0.5 * e1 * s1 * std::cos(phase) + e2 * s2 / 8.0;
  const double ee = 3.0 / 8.0 - 0.5 * e1 * s1 * std::cos(phase) + e2 * s2 / 8.0;
  const cplx ggee{(1.0 - e2 * s2) / 8.0, -0.5 * e1 * s1 * std::sin(phase)};
  const double mixed = (1.0 - gg - ee) / 2.0;

  CMatrix rho = CMatrix::Zero(4, 4);
  rho(0, 0) = gg;
  rho(3, 3) = ee;
  rho(0, 3) = ggee;
  rho(3, 0) = std::conj(ggee);
  rho(1, 1) = rho(2, 2) = rho(1, 2) = rho(2, 1) = mixed;
  return rho;
}

double epr_population(const CMatrix& rho_spin) {
  if (rho_spin.rows() != 4) throw std::invalid_argument("epr_population: expects a 4x4 matrix");
  return hilbert::ghz_fidelity(rho_spin);
}

StateVector apply_propagator(const TrapParams& params, double t, const StateVector& state) {
  if (state.n_ions() != params.n_ions)
    throw std::invalid_argument("apply_propagator: ion count mismatch");
  return apply_propagator(trajectory(params, t), state);
}

StateVector apply_propagator(const PhaseSpacePoint& point, const StateVector& state) {
  const QuadratureExp quad(state.fock());
  return apply_spin_conditioned(state, SpinAxis::Y, [&](double m) -> CMatrix {
    return std::exp(-kI * point.A * m * m) * quad.x(point.F * m) * quad.p(point.G * m);
  });
}

StateVector stroboscopic_propagator(double lambda1, double lambda2, double segment_time,
                                    int n_cycles, const StateVector& state, SpinAxis axis) {
  if (n_cycles < 0) throw std::invalid_argument("stroboscopic_propagator: n_cycles must be >= 0");
  const QuadratureExp quad(state.fock());
  const double s = segment_time;
  return apply_spin_conditioned(state, axis, [&](double m) -> CMatrix {
    // exp(i H2 s) exp(i H1 s) exp(-i H2 s) exp(-i H1 s) restricted to J = m
    const CMatrix cycle = quad.x(-lambda2 * m * s) * quad.p(-lambda1 * m * s) *
                          quad.x(lambda2 * m * s) * quad.p(lambda1 * m * s);
    CMatrix total = CMatrix::Identity(cycle.rows(), cycle.cols());
    for (int k = 0; k < n_cycles; ++k) total = cycle * total;
    return total;
  });
}

U6Corrections strong_field_correction_u6(const TrapParams& params, int K, int n) {
  if (n < 0) throw std::invalid_argument("strong_field_correction_u6: n must be >= 0");
  const double tau = gate_schedule(params, K).tau;
  const double w = params.sideband_gap();
  const double eta = params.lamb_dicke, om = params.rabi_freq;
  const double eta2 = eta * eta;
  const double base = -(om * eta) * (om * eta) / w;
  const double dn = static_cast<double>(n);
  const double bracket =
      1.0 - eta2 * (2.0 * dn + 1.0) + eta2 * eta2 * (1.25 * dn * dn + 1.25 * dn + 0.5);
  U6Corrections c;
  c.jy2_phase = base * tau * bracket;
  c.jy3x_coeff = std::pow(eta, 5) * std::sqrt(8.0) * std::pow(om, 3) * tau / (w * w);
  c.jy4_coeff = std::pow(eta, 6) * 5.0 * std::pow(om, 4) * tau / (2.0 * w * w * w);
  return c;
}

U3Exponents u3_exponents(const TrapParams& params, double t) {
  require_offresonant(params);
  const double w = params.sideband_gap();
  const double kappa = std::sqrt(2.0) * std::pow(params.lamb_dicke, 3) * params.rabi_freq / 12.0;
  return {kappa * std::sin(w * t) / w, kappa * (1.0 - std::cos(w * t)) / w};
}

StateVector apply_u3(const TrapParams& params, double t, const StateVector& state) {
  const U3Exponents c = u3_exponents(params, t);
  const CMatrix x = state.fock().position().cast<cplx>();
  const CMatrix p = state.fock().momentum();
  const CMatrix h1 = 3.0 * x * x * x + x * p * p + p * x * p + p * p * x;
  const CMatrix h2 = 3.0 * p * p * p + p * x * x + x * p * x + x * x * p;
  const detail::HermitianExp e1(h1), e2(h2);
  return apply_spin_conditioned(state, SpinAxis::Y, [&](double m) -> CMatrix {
    return e1(c.h1_coeff * m) * e2(c.h2_coeff * m);
  });
}

}  // namespace iongate::analytic
