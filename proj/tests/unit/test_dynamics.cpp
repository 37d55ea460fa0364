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

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "iongate/analytic.hpp"
#include "iongate/dynamics.hpp"
#include "oracles.hpp"

namespace iongate {
namespace {

using dynamics::Variant;
using testing::max_abs;

TrapParams fig3b() {
  TrapParams p;
  p.detuning = 0.95;
  p.lamb_dicke = 0.1;
  p.rabi_freq = 0.177;
  return p;
}

double tau_fig3b() { return analytic::gate_schedule(fig3b(), 2).tau; }

TEST(Hamiltonian, HermitianForEveryVariant) {
  const hilbert::FockSpace fock(12);
  for (auto v : {Variant::Full, Variant::NonLambDicke, Variant::RwaLambDicke, Variant::XP}) {
    const dynamics::Hamiltonian h({v, fig3b()}, fock);
    for (double t : {0.0, 0.3, 7.7}) {
      const CMatrix m = h.dense(t);
      EXPECT_LT(max_abs(m - m.adjoint()), 1e-14) << dynamics::to_string(v);
    }
    EXPECT_NEAR(h.period(), 2.0 * kPi / 0.95, 1e-15);
  }
}

TEST(Hamiltonian, FullEqualsCosineSineFormInside) {
  // S+ D + S- D^dag = 2 J_x cos(sqrt2 eta x) - 2 J_y sin(sqrt2 eta x); the two
  // builds differ only through truncation, so compare well inside.
  const hilbert::FockSpace fock(60);
  const dynamics::Hamiltonian full({Variant::Full, fig3b()}, fock);
  const dynamics::Hamiltonian nld({Variant::NonLambDicke, fig3b()}, fock);
  const CMatrix a = full.dense(1.3), b = nld.dense(1.3);
  EXPECT_LT(max_abs(a.topLeftCorner(4 * 20, 4 * 20) - b.topLeftCorner(4 * 20, 4 * 20)), 1e-10);
}

TEST(Hamiltonian, SymmetricSectorIsProjection) {
  const hilbert::FockSpace fock(8);
  const dynamics::Hamiltonian h({Variant::Full, fig3b()}, fock);
  const dynamics::Hamiltonian s({Variant::Full, fig3b()}, fock, dynamics::SpinSector::Symmetric);
  EXPECT_EQ(s.spin_dim(), 3);
  const CMatrix d = hilbert::dicke_basis(2).cast<cplx>();
  const CMatrix p = Eigen::kroneckerProduct(CMatrix::Identity(9, 9), d).eval();
  EXPECT_LT(max_abs(p.adjoint() * h.dense(2.1) * p - s.dense(2.1)), 1e-14);
}

TEST(Schrodinger, NoDriveNoChange) {
  TrapParams p = fig3b();
  p.rabi_freq = 0.0;
  const hilbert::FockSpace fock(10);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 3);
  const auto tr = dynamics::evolve_schrodinger({Variant::Full, p}, psi, {5.0, 20.0});
  for (const auto& s : tr.states)
    EXPECT_LT((s.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Schrodinger, XpVariantReproducesAnalyticPropagator) {
  const TrapParams p = fig3b();
  const hilbert::FockSpace fock(40);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 2);
  const std::vector<double> times{40.0, 125.0, tau_fig3b()};
  const auto tr = dynamics::evolve_schrodinger({Variant::XP, p}, psi, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto ref = analytic::apply_propagator(p, times[j], psi);
    EXPECT_LT((tr.states[j].amplitudes() - ref.amplitudes()).cwiseAbs().maxCoeff(), 1e-6);
  }
  EXPECT_LT(tr.report.max_norm_drift, 1e-6);
}

TEST(Schrodinger, GateRejectsUnreachableTolerance) {
  const hilbert::FockSpace fock(30);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 0);
  dynamics::IntegratorOptions opt;
  opt.step = 2.0;
  opt.tolerance = 1e-14;
  opt.max_refinements = 1;
  EXPECT_THROW(dynamics::evolve_schrodinger({Variant::RwaLambDicke, fig3b()}, psi, {30.0}, opt),
               StepFailure);
}

TEST(Schrodinger, RejectsBadTimes) {
  const hilbert::FockSpace fock(10);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 0);
  EXPECT_THROW(dynamics::evolve_schrodinger({Variant::XP, fig3b()}, psi, {3.0, 1.0}),
               std::invalid_argument);
  EXPECT_THROW(dynamics::evolve_schrodinger({Variant::XP, fig3b()}, psi, {}), std::invalid_argument);
}

TEST(Ensemble, XpThermalMatchesClosedForm) {
  const auto d = hilbert::thermal_dist(2.0, hilbert::thermal_cutoff(2.0));
  const std::vector<double> times{50.0, 150.0, tau_fig3b()};
  const auto tr = dynamics::evolve_thermal({Variant::XP, fig3b()}, 2.0, times);
  for (std::size_t j = 0; j < times.size(); ++j)
    EXPECT_LT(max_abs(tr.spin[j] - analytic::density_elements(fig3b(), times[j], d)), 1e-6);
  EXPECT_LT(tr.dropped_weight, 1e-7);
}

TEST(Ensemble, PeriodicMatchesDirect) {
  dynamics::EnsembleOptions a, b;
  a.method = dynamics::EnsembleOptions::Method::Direct;
  b.method = dynamics::EnsembleOptions::Method::Periodic;
  const double T = 2.0 * kPi / 0.95;
  const std::vector<double> times{0.4 * T, 3.0 * T, 7.25 * T};
  const std::vector<double> w{0.5, 0.3, 0.2};
  const auto x = dynamics::evolve_ensemble({Variant::RwaLambDicke, fig3b()}, w, times, a);
  const auto y = dynamics::evolve_ensemble({Variant::RwaLambDicke, fig3b()}, w, times, b);
  EXPECT_FALSE(x.periodic);
  EXPECT_TRUE(y.periodic);
  for (std::size_t j = 0; j < times.size(); ++j) EXPECT_LT(max_abs(x.spin[j] - y.spin[j]), 1e-9);
}

TEST(Ensemble, TruncationGuardFires) {
  dynamics::EnsembleOptions opt;
  opt.margin = 0;
  opt.max_widenings = 0;
  opt.symmetric_subspace = false;
  EXPECT_THROW(dynamics::evolve_ensemble({Variant::RwaLambDicke, fig3b()}, {1.0}, {60.0}, opt),
               TruncationError);
}

TEST(Ensemble, TailWeightIsReported) {
  dynamics::EnsembleOptions opt;
  opt.ensemble_tail = 0.05;
  const auto tr = dynamics::evolve_thermal({Variant::XP, fig3b()}, 2.0, {10.0}, opt);
  EXPECT_GT(tr.dropped_weight, 0.0);
  EXPECT_LE(tr.dropped_weight, 0.05 + 1e-12);
  // Members are renormalized over the kept weight.
  EXPECT_NEAR(tr.spin[0].trace().real(), 1.0, 1e-9);
}

TEST(Ensemble, WeakFieldTransferIsIndependentOfN) {
  // Weak drive, K = 25: after one closure the transfer barely depends on n.
  TrapParams p;
  p.detuning = 0.9;
  p.lamb_dicke = 0.1;
  p.rabi_freq = 0.1;
  const double tau = analytic::gate_schedule(p, 25).tau;
  std::vector<double> pops;
  for (int n = 0; n <= 5; ++n) {
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    w.back() = 1.0;
    const auto tr = dynamics::evolve_ensemble({Variant::XP, p}, w, {tau});
    pops.push_back(tr.spin[0](3, 3).real());
  }
  for (double v : pops) EXPECT_NEAR(v, pops[0], 1e-3);
}

TEST(Lindblad, NoHeatingMatchesSchrodinger) {
  const hilbert::FockSpace fock(30);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 1);
  const hilbert::DensityOperator rho(2, fock, psi.amplitudes() * psi.amplitudes().adjoint());
  const std::vector<double> times{60.0, tau_fig3b()};
  const auto l = dynamics::evolve_lindblad({Variant::XP, fig3b()}, {}, rho, times);
  const auto s = dynamics::evolve_schrodinger({Variant::XP, fig3b()}, psi, times);
  for (std::size_t j = 0; j < times.size(); ++j)
    EXPECT_LT(max_abs(l.states[j].reduced_spin() - s.states[j].reduced_spin()), 1e-8);
}

TEST(Lindblad, ThermalFixedPointIsStationary) {
  TrapParams p = fig3b();
  p.rabi_freq = 0.0;
  const hilbert::FockSpace fock(40);
  const auto d = hilbert::thermal_dist(1.0, 40);
  const auto rho = hilbert::DensityOperator::ground_spins_thermal(2, fock, d);
  const double t = 50.0;
  const auto tr = dynamics::evolve_lindblad({Variant::XP, p}, {0.02, 1.0}, rho, {t});
  EXPECT_LT(max_abs(tr.states[0].matrix() - rho.matrix()) / t, 1e-6);
}

TEST(Lindblad, AmplitudeRatesMatchRateEquation) {
  TrapParams p = fig3b();
  p.rabi_freq = 0.0;
  const double gamma = 0.05, nth = 0.7;
  const int cutoff = 25;
  const hilbert::FockSpace fock(cutoff);
  const auto rho = hilbert::DensityOperator::ground_spins_thermal(1, fock, hilbert::thermal_dist(0.0, cutoff));
  const std::vector<double> times{5.0, 20.0, 40.0};
  TrapParams one = p;
  one.n_ions = 1;
  const auto tr = dynamics::evolve_lindblad({Variant::XP, one}, {gamma, nth}, rho, times);

  // Independent oracle: classical rate equation for P_n, small-step RK4.
  auto rhs = [&](const Eigen::VectorXd& P) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(P.size());
    for (int n = 0; n <= cutoff; ++n) {
      const double up = n < cutoff ? P[n + 1] : 0.0, dn = n > 0 ? P[n - 1] : 0.0;
      const double out_down = n, out_up = n < cutoff ? n + 1 : 0;
      d[n] = gamma * (1 + nth) * ((n + 1) * up - out_down * P[n]) +
             gamma * nth * (n * dn - out_up * P[n]);
    }
    return d;
  };
  Eigen::VectorXd P = Eigen::VectorXd::Zero(cutoff + 1);
  P[0] = 1.0;
  double t = 0.0;
  const double h = 1e-3;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const long steps = std::lround((times[j] - t) / h);
    for (long k = 0; k < steps; ++k) {
      const auto k1 = rhs(P), k2 = rhs(P + 0.5 * h * k1), k3 = rhs(P + 0.5 * h * k2),
                 k4 = rhs(P + h * k3);
      P += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    t = times[j];
    const RVector got = tr.states[j].fock_populations();
    EXPECT_LT((got - P).cwiseAbs().maxCoeff(), 1e-7);
    double mean = 0.0;
    for (int n = 0; n <= cutoff; ++n) mean += n * got[n];
    EXPECT_NEAR(mean, nth * (1.0 - std::exp(-gamma * times[j])), 1e-6);
    // Vacuum heats into a thermal state of the growing mean.
    const double nt = nth * (1.0 - std::exp(-gamma * times[j]));
    EXPECT_NEAR(got[0], 1.0 / (1.0 + nt), 1e-9);
  }
}

TEST(Lindblad, RejectsInvalidDensity) {
  const hilbert::FockSpace fock(5);
  CMatrix bad = CMatrix::Identity(24, 24);
  EXPECT_THROW(dynamics::evolve_lindblad({Variant::XP, fig3b()}, {},
                                         hilbert::DensityOperator(2, fock, bad), {1.0}),
               std::invalid_argument);
}

TEST(Dephasing, ClosedFormExamples) {
  const analytic::PhaseSpaceTrajectory path{analytic::CircularSchedule{fig3b()}};
  EXPECT_EQ(dynamics::dephasing_factor({0.0, 3.0}, path, 100.0, 2.0), 1.0);
  EXPECT_EQ(dynamics::dephasing_factor({0.1, 3.0}, path, 100.0, 0.0), 1.0);
  // gamma (1 + 2 n_th) tau / (4 K) = 0.1 with delta M = 2
  const int K = 2;
  const double tau = tau_fig3b();
  const dynamics::HeatingParams h{0.1 * 4 * K / (3.0 * tau), 1.0};
  EXPECT_NEAR(dynamics::dephasing_factor_at_closure(h, K, tau, 2.0), std::exp(-0.4), 1e-15);
}

TEST(Dephasing, PathIntegralMatchesClosureForm) {
  TrapParams p = fig3b();
  p.rabi_freq = analytic::resonant_rabi_freq(p, 2);
  const analytic::PhaseSpaceTrajectory path{analytic::CircularSchedule{p}};
  const double tau = analytic::gate_schedule(p, 2).tau;
  const dynamics::HeatingParams h{1e-3, 0.5};
  for (double dm : {1.0, 2.0})
    EXPECT_NEAR(dynamics::dephasing_factor(h, path, tau, dm),
                dynamics::dephasing_factor_at_closure(h, 2, tau, dm), 1e-12);
  // Rectangle: int (F^2 + G^2) by Simpson on each constant-rate segment.
  const auto rs = analytic::default_rectangular_schedule();
  const analytic::PhaseSpaceTrajectory rect{rs};
  double area = 0.0;
  const double s = rs.segment_time;
  for (int seg = 0; seg < 4; ++seg) {
    const int n = 400;
    const double a = seg * s, hh = s / n;
    auto fn = [&](double u) {
      const auto z = rect.at(u);
      return z.F * z.F + z.G * z.G;
    };
    double sum = fn(a) + fn(a + s);
    for (int i = 1; i < n; ++i) sum += fn(a + i * hh) * (i % 2 ? 4.0 : 2.0);
    area += sum * hh / 3.0;
  }
  EXPECT_NEAR(dynamics::dephasing_factor(h, rect, 4 * s, 2.0),
              std::exp(-4.0 * h.gamma * (1 + 2 * h.n_thermal) / 4.0 * area), 1e-12);
}

TEST(Dephasing, JyCoherencesFollowIntegratedDecay) {
  // Lindblad with weak damping against the unheated run times the decay factor,
  // element by element in the J_y eigenbasis.
  const TrapParams p = fig3b();
  const int K = 2;
  const double tau = tau_fig3b();
  const double nth = 10.0;
  const dynamics::HeatingParams heat{0.05 * 4 * K / ((1 + 2 * nth) * tau), nth};
  const hilbert::FockSpace fock(34);
  const auto rho = hilbert::DensityOperator::ground_spins_thermal(
      2, fock, hilbert::thermal_dist(0.25, 34));
  const std::vector<double> times{tau / 2.0, tau};
  const auto hot = dynamics::evolve_lindblad({Variant::XP, p}, heat, rho, times);
  const auto cold = dynamics::evolve_lindblad({Variant::XP, p}, {}, rho, times);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(testing::dense(hilbert::build_spin_ops(2).jy));
  const CMatrix v = eig.eigenvectors();
  const auto m = eig.eigenvalues();
  const analytic::PhaseSpaceTrajectory path{analytic::CircularSchedule{p}};
  for (std::size_t j = 0; j < times.size(); ++j) {
    const CMatrix a = v.adjoint() * hot.states[j].reduced_spin() * v;
    const CMatrix b = v.adjoint() * cold.states[j].reduced_spin() * v;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const double f = dynamics::dephasing_factor(heat, path, times[j], m[r] - m[c]);
        EXPECT_LT(std::abs(a(r, c) - f * b(r, c)), 1e-3) << j << " " << r << " " << c;
      }
  }
}

}  // namespace
}  // namespace iongate
