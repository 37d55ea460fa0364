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

#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "iongate/analytic.hpp"
#include "oracles.hpp"

namespace iongate {
namespace {

using testing::max_abs;

TrapParams fig3b() {
  TrapParams p;
  p.detuning = 0.95;
  p.lamb_dicke = 0.1;
  p.rabi_freq = 0.177;
  return p;
}

TrapParams resonant(int n_ions, int K) {
  TrapParams p = fig3b();
  p.n_ions = n_ions;
  p.rabi_freq = analytic::resonant_rabi_freq(p, K);
  return p;
}

// Simpson rule for a smooth integrand on [a, b] with n (even) panels.
template <class Fn>
double simpson(Fn&& fn, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = fn(a) + fn(b);
  for (int i = 1; i < n; ++i) s += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

TEST(Trajectory, StartsAtOriginAndClosesEveryLoop) {
  const TrapParams p = fig3b();
  const auto z = analytic::trajectory(p, 0.0);
  EXPECT_EQ(z.F, 0.0);
  EXPECT_EQ(z.G, 0.0);
  EXPECT_EQ(z.A, 0.0);
  const double w = 1.0 - p.detuning;
  for (int K = 1; K <= 3; ++K) {
    const double tau = 2.0 * kPi * K / w;
    const auto c = analytic::trajectory(p, tau);
    EXPECT_NEAR(c.F, 0.0, 1e-12);
    EXPECT_NEAR(c.G, 0.0, 1e-12);
    const double eo = p.lamb_dicke * p.rabi_freq;
    EXPECT_NEAR(c.A, -eo * eo * tau / w, 1e-12);
  }
}

TEST(Trajectory, ResonantDriveGivesQuarterTurn) {
  for (int K = 1; K <= 4; ++K) {
    const TrapParams p = resonant(2, K);
    const auto s = analytic::gate_schedule(p, K);
    EXPECT_NEAR(analytic::trajectory(p, s.tau).A, -kPi / 2.0, 1e-12);
    EXPECT_NEAR(analytic::resonance_mismatch(p, K), 0.0, 1e-14);
  }
  // delta = 0.95, Omega = 0.177 is resonant for K = 2 to about 0.1%.
  EXPECT_LT(analytic::resonance_mismatch(fig3b(), 2), 2e-3);
}

TEST(Trajectory, RatesAreDerivativesOfFAndG) {
  const analytic::PhaseSpaceTrajectory path{analytic::CircularSchedule{fig3b()}};
  const double h = 1e-4;
  for (double t : {1.0, 17.3, 80.0, 200.0}) {
    const auto a = path.at(t - h), b = path.at(t + h);
    EXPECT_NEAR((b.F - a.F) / (2 * h), path.f(t), 1e-7);
    EXPECT_NEAR((b.G - a.G) / (2 * h), path.g(t), 1e-7);
    // A' = -F g
    EXPECT_NEAR((b.A - a.A) / (2 * h), -path.at(t).F * path.g(t), 1e-7);
  }
}

TEST(Trajectory, GeometricAreaIdentity) {
  // A(t) = -int_0^t F dG, evaluated by quadrature.
  const analytic::PhaseSpaceTrajectory circle{analytic::CircularSchedule{fig3b()}};
  for (double t : {30.0, 125.6, 251.327}) {
    const double area = -simpson([&](double s) { return circle.at(s).F * circle.g(s); }, 0.0, t,
                                 20000);
    EXPECT_NEAR(circle.at(t).A, area, 1e-8) << t;
  }
  const auto rect_sched = analytic::default_rectangular_schedule();
  const analytic::PhaseSpaceTrajectory rect{rect_sched};
  const double s = rect_sched.segment_time;
  double area = 0.0;  // piecewise constant rates: integrate each segment separately
  for (int seg = 0; seg < 4; ++seg)
    area -= simpson([&](double u) { return rect.at(u).F * rect.g(u); }, seg * s, (seg + 1) * s,
                    200);
  EXPECT_NEAR(rect.at(4 * s).A, area, 1e-8);
  EXPECT_NEAR(rect.at(4 * s).A, rect_sched.phase_per_cycle(), 1e-12);
  EXPECT_NEAR(rect.at(4 * s).F, 0.0, 1e-14);
  EXPECT_NEAR(rect.at(4 * s).G, 0.0, 1e-14);
  EXPECT_NEAR(rect.loop_time(), 4 * s, 1e-12);
}

TEST(GateTime, TableOneCells) {
  const double two_pi = 2.0 * kPi;
  // Omega = 0.1 nu with nu / 2pi = 1 MHz, K = 1: 50 us.
  EXPECT_NEAR(analytic::gate_time(0.1, two_pi * 0.1e6, 1), 50e-6, 1e-12 * 50e-6);
  EXPECT_NEAR(analytic::gate_time(0.1, two_pi * 0.05 * 0.5e6, 1), 200e-6, 1e-12 * 200e-6);
  EXPECT_NEAR(analytic::gate_time(0.1, two_pi * 0.2 * 10e6, 1), 2.5e-6, 1e-12 * 2.5e-6);
  const double one = analytic::gate_time(0.13, 0.21, 1);
  EXPECT_NEAR(analytic::gate_time(0.13, 0.21, 4), 2.0 * one, 1e-15);
  EXPECT_THROW(analytic::gate_time(0.0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(analytic::gate_time(0.1, 1.0, 0), std::invalid_argument);
}

TEST(DensityElements, InitialStateAndTrace) {
  const auto d = hilbert::thermal_dist(2.0, hilbert::thermal_cutoff(2.0));
  const CMatrix r0 = analytic::density_elements(fig3b(), 0.0, d);
  EXPECT_NEAR(r0(0, 0).real(), 1.0, 1e-14);
  for (double t : {13.0, 77.0, 251.0}) {
    const CMatrix r = analytic::density_elements(fig3b(), t, d);
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-14);
    EXPECT_LT(max_abs(r - r.adjoint()), 1e-15);
  }
  TrapParams three = fig3b();
  three.n_ions = 3;
  EXPECT_THROW(analytic::density_elements(three, 1.0, d), std::invalid_argument);
}

TEST(DensityElements, FastGateFormsEprState) {
  const auto d = hilbert::thermal_dist(2.0, hilbert::thermal_cutoff(2.0));
  const double tau = analytic::gate_schedule(fig3b(), 2).tau;
  EXPECT_NEAR(tau, 251.327, 1e-3);
  const CMatrix r = analytic::density_elements(fig3b(), tau, d);
  EXPECT_GT(analytic::epr_population(r), 0.995);
  EXPECT_NEAR(r(0, 3).imag(), 0.5, 1e-3);  // Im rho_gg,ee -> +1/2 for |gg> - i|ee>
}

TEST(DensityElements, AgreeWithPropagatorOnThermalEnsemble) {
  const TrapParams p = fig3b();
  const auto d = hilbert::thermal_dist(2.0, hilbert::thermal_cutoff(2.0));
  const hilbert::FockSpace fock(d.cutoff() + 40);
  for (double t : {37.0, 120.0, 200.5, 251.327}) {
    CMatrix mix = CMatrix::Zero(4, 4);
    for (int n = 0; n <= d.cutoff(); ++n) {
      const auto psi = hilbert::StateVector::basis(2, fock, 0, n);
      mix += d.probs[n] * analytic::apply_propagator(p, t, psi).reduced_spin();
    }
    EXPECT_LT(max_abs(mix - analytic::density_elements(p, t, d)), 1e-9) << t;
  }
}

TEST(Propagator, IdentityAtZeroAndUnitary) {
  const TrapParams p = fig3b();
  const hilbert::FockSpace fock(40);
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  CVector amp(4 * 41);
  for (int i = 0; i < amp.size(); ++i) amp[i] = {g(rng), g(rng)};
  // keep the random state well inside the truncation
  for (int n = 15; n <= 40; ++n) amp.segment(4 * n, 4).setZero();
  amp.normalize();
  const hilbert::StateVector psi(2, fock, amp);
  EXPECT_LT((analytic::apply_propagator(p, 0.0, psi).amplitudes() - amp).cwiseAbs().maxCoeff(),
            1e-14);
  for (double t : {10.0, 99.0, 251.3})
    EXPECT_NEAR(analytic::apply_propagator(p, t, psi).norm(), 1.0, 1e-9);
}

TEST(Propagator, ClosureGivesEprTimesVacuum) {
  const TrapParams p = resonant(2, 1);
  const double tau = analytic::gate_schedule(p, 1).tau;
  const hilbert::FockSpace fock(30);
  const auto out = analytic::apply_propagator(p, tau, hilbert::StateVector::basis(2, fock, 0, 0));
  const auto m = out.as_matrix();  // spin x level
  const CVector target = hilbert::ghz_target(2);
  const cplx overlap = target.dot(m.col(0));
  EXPECT_NEAR(std::abs(overlap), 1.0, 1e-12);
}

TEST(Propagator, GuardsTruncation) {
  const TrapParams p = fig3b();
  const hilbert::FockSpace tiny(4);
  const auto psi = hilbert::StateVector::basis(2, tiny, 0, 0);
  EXPECT_THROW(analytic::apply_propagator(p, 60.0, psi), TruncationError);
}

TEST(Stroboscopic, QuarterTurnEntanglesAndRestoresMotion) {
  const double s = std::sqrt(kPi / 2.0);  // lambda1 lambda2 s^2 = pi/2
  const hilbert::FockSpace fock(60);
  for (int n : {0, 1, 4}) {
    const auto out =
        analytic::stroboscopic_propagator(1.0, 1.0, s, 1, hilbert::StateVector::basis(2, fock, 0, n));
    const CMatrix rho = out.reduced_spin();
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-9);
    EXPECT_NEAR(rho(3, 3).real(), 0.5, 1e-9);
    EXPECT_NEAR(std::abs(rho(0, 3)), 0.5, 1e-9);
    EXPECT_NEAR(out.fock_populations()[n], 1.0, 1e-9);
  }
}

TEST(Stroboscopic, ZeroCouplingLeavesPopulations) {
  const hilbert::FockSpace fock(20);
  const auto in = hilbert::StateVector::basis(2, fock, 1, 3);
  const auto out = analytic::stroboscopic_propagator(0.0, 0.8, 0.7, 5, in);
  EXPECT_LT((out.reduced_spin() - in.reduced_spin()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stroboscopic, OneCycleMatchesFourFactorProduct) {
  const int cutoff = 24;
  const hilbert::FockSpace fock(cutoff);
  const auto ops = hilbert::build_spin_ops(2);
  const CMatrix a = testing::ladder(cutoff);
  const CMatrix x = (a + a.adjoint()) / std::sqrt(2.0);
  const CMatrix pm = kI * (a.adjoint() - a) / std::sqrt(2.0);
  const CMatrix j = testing::dense(ops.jy);
  // Register index fastest: kron(level op, spin op).
  const CMatrix h1 = 0.9 * Eigen::kroneckerProduct(pm, j).eval();
  const CMatrix h2 = 0.6 * Eigen::kroneckerProduct(x, j).eval();
  const double s = 0.35;
  const CMatrix u = testing::taylor_exp(kI * h2 * s) * testing::taylor_exp(kI * h1 * s) *
                    testing::taylor_exp(-kI * h2 * s) * testing::taylor_exp(-kI * h1 * s);
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  CVector amp(4 * (cutoff + 1));
  for (int i = 0; i < amp.size(); ++i) amp[i] = {g(rng), g(rng)};
  for (int n = 8; n <= cutoff; ++n) amp.segment(4 * n, 4).setZero();
  amp.normalize();
  const hilbert::StateVector psi(2, fock, amp);
  const auto out = analytic::stroboscopic_propagator(0.9, 0.6, s, 1, psi);
  EXPECT_LT((out.amplitudes() - u * amp).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StrongField, CorrectionsVanishWithEta) {
  TrapParams p = fig3b();
  p.lamb_dicke = 0.0;
  const auto c = analytic::strong_field_correction_u6(p, 2, 3);
  EXPECT_EQ(c.jy2_phase, 0.0);
  EXPECT_EQ(c.jy3x_coeff, 0.0);
  EXPECT_EQ(c.jy4_coeff, 0.0);
}

TEST(StrongField, HigherTermsFadeForManyLoops) {
  const auto one = analytic::strong_field_correction_u6(resonant(2, 1), 1, 2);
  const auto many = analytic::strong_field_correction_u6(resonant(2, 10000), 10000, 2);
  EXPECT_LT(many.jy3x_coeff, 0.011 * one.jy3x_coeff);
  EXPECT_LT(many.jy4_coeff, 1.1e-4 * one.jy4_coeff);
  // The J_y^2 phase stays at the quarter turn times the bracket.
  EXPECT_NEAR(many.jy2_phase / one.jy2_phase, 1.0, 1e-12);
}

TEST(StrongField, BracketForFigFiveParameters) {
  TrapParams p;
  p.detuning = 0.9;
  p.lamb_dicke = 0.2;
  p.rabi_freq = 0.02;
  const int n = 5;
  const auto c = analytic::strong_field_correction_u6(p, 1, n);
  const double base = -(0.2 * 0.02) * (0.2 * 0.02) / 0.1;
  const double tau = 2.0 * kPi / 0.1;
  const double bracket = 1.0 - 0.04 * 11.0 + 0.0016 * (1.25 * 25 + 1.25 * 5 + 0.5);
  EXPECT_NEAR(c.jy2_phase, base * tau * bracket, 1e-15);
}

TEST(ThirdOrder, IdentityAtClosure) {
  const TrapParams p = fig3b();
  const double tau = analytic::gate_schedule(p, 2).tau;
  const auto e = analytic::u3_exponents(p, tau);
  EXPECT_NEAR(e.h1_coeff, 0.0, 1e-15);
  EXPECT_NEAR(e.h2_coeff, 0.0, 1e-15);
  const hilbert::FockSpace fock(20);
  const auto in = hilbert::StateVector::basis(2, fock, 0, 2);
  const auto out = analytic::apply_u3(p, tau, in);
  EXPECT_LT((out.amplitudes() - in.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  // Midway the correction is small, so first order in the exponents suffices.
  const double t = tau / 4.0;
  const auto mid = analytic::apply_u3(p, t, in);
  const CMatrix a = testing::ladder(20);
  const CMatrix x = (a + a.adjoint()) / std::sqrt(2.0);
  const CMatrix pm = kI * (a.adjoint() - a) / std::sqrt(2.0);
  const CMatrix h1 = 3.0 * x * x * x + x * pm * pm + pm * x * pm + pm * pm * x;
  const CMatrix h2 = 3.0 * pm * pm * pm + pm * x * x + x * pm * x + x * x * pm;
  const double w = 1.0 - p.detuning;
  const double kappa = std::sqrt(2.0) * std::pow(p.lamb_dicke, 3) * p.rabi_freq / 12.0;
  const double c1 = kappa * std::sin(w * t) / w, c2 = kappa * (1.0 - std::cos(w * t)) / w;
  const CMatrix jy = testing::dense(hilbert::build_spin_ops(2).jy);
  const CMatrix gen = Eigen::kroneckerProduct((c1 * h1 + c2 * h2).eval(), jy).eval();
  const CVector first = -kI * gen * in.amplitudes();
  const double moved = (mid.amplitudes() - in.amplitudes()).norm();
  EXPECT_GT(moved, 1e-3);
  EXPECT_NEAR(moved, first.norm(), 0.05 * first.norm());
}

}  // namespace
}  // namespace iongate
