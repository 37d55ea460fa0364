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

#include "iongate/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iongate/special.hpp"

namespace iongate::hilbert {
namespace {

using Triplet = Eigen::Triplet<cplx>;

// Single-ion operator `local` (2x2, basis g=0, e=1) acting on ion k.
SparseOp embed(const Eigen::Matrix2cd& local, int k, int n_ions) {
  const int dim = 1 << n_ions;
  std::vector<Triplet> entries;
  entries.reserve(2 * dim);
  for (int col = 0; col < dim; ++col) {
    const int bit = (col >> k) & 1;
    for (int out = 0; out < 2; ++out) {
      const cplx v = local(out, bit);
      if (v == cplx{}) continue;
      const int row = (col & ~(1 << k)) | (out << k);
      entries.emplace_back(row, col, v);
    }
  }
  SparseOp op(dim, dim);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

}  // namespace

SpinOperatorSet build_spin_ops(int n_ions) {
  if (n_ions < 1 || n_ions > kMaxIons)
    throw std::invalid_argument("build_spin_ops: n_ions must be in [1, " +
                                std::to_string(kMaxIons) + "]");
  Eigen::Matrix2cd sx, sy, sz, sp, sm;
  sx << 0, 1, 1, 0;
  sy << 0, kI, -kI, 0;  // [[0,-i],[i,0]] in (e, g) order
  sz << -1, 0, 0, 1;
  sp << 0, 0, 1, 0;     // |e><g|
  sm << 0, 1, 0, 0;

  SpinOperatorSet ops;
  ops.n_ions = n_ions;
  const int dim = 1 << n_ions;
  ops.jx = ops.jy = ops.jz = ops.raising = ops.lowering = SparseOp(dim, dim);
  ops.ions.reserve(n_ions);
  for (int k = 0; k < n_ions; ++k) {
    SpinOperatorSet::Ion ion{embed(0.5 * sx, k, n_ions), embed(0.5 * sy, k, n_ions),
                             embed(0.5 * sz, k, n_ions)};
    ops.jx += ion.jx;
    ops.jy += ion.jy;
    ops.jz += ion.jz;
    ops.raising += embed(sp, k, n_ions);
    ops.lowering += embed(sm, k, n_ions);
    ops.ions.push_back(std::move(ion));
  }
  return ops;
}

RMatrix dicke_basis(int n_ions) {
  if (n_ions < 1 || n_ions > kMaxIons) throw std::invalid_argument("dicke_basis: bad n_ions");
  const int dim = 1 << n_ions;
  RMatrix p = RMatrix::Zero(dim, n_ions + 1);
  for (int s = 0; s < dim; ++s) p(s, __builtin_popcount(static_cast<unsigned>(s))) = 1.0;
  for (int k = 0; k <= n_ions; ++k) p.col(k).normalize();
  return p;
}

FockSpace::FockSpace(int cutoff, int floor) : cutoff_(cutoff), floor_(floor) {
  if (floor < 0) throw std::invalid_argument("FockSpace: floor must be >= 0");
  if (cutoff < floor + 1) throw std::invalid_argument("FockSpace: need at least two levels");
}

RMatrix FockSpace::lowering() const {
  RMatrix a = RMatrix::Zero(size(), size());
  for (int i = 1; i < size(); ++i) a(i - 1, i) = std::sqrt(static_cast<double>(floor_ + i));
  return a;
}

RMatrix FockSpace::position() const {
  const RMatrix a = lowering();
  return (a + a.transpose()) / std::sqrt(2.0);
}

CMatrix FockSpace::momentum() const {
  const RMatrix a = lowering();
  return (kI / std::sqrt(2.0)) * (a.transpose() - a).cast<cplx>();
}

int FockSpace::guard_levels() const noexcept {
  return std::max(1, static_cast<int>(std::ceil(0.1 * size())));
}

cplx displacement_element(int n, int m, cplx alpha) {
  if (n < 0 || m < 0) throw std::invalid_argument("displacement_element: negative level");
  const double r2 = std::norm(alpha);
  const int lo = std::min(n, m);
  const int d = std::abs(n - m);
  if (r2 == 0.0) return d == 0 ? cplx{1.0} : cplx{};
  // sqrt(lo!/hi!) |alpha|^d e^{-|alpha|^2/2}, assembled in log space.
  const double log_mag = d * 0.5 * std::log(r2) - 0.5 * r2 +
                         0.5 * (special::log_factorial(lo) - special::log_factorial(lo + d));
  const cplx unit = n >= m ? alpha / std::abs(alpha) : -std::conj(alpha) / std::abs(alpha);
  return std::exp(log_mag) * std::pow(unit, d) * special::laguerre(lo, d, r2);
}

cplx displacement_element(int n, int m, double eta) {
  return displacement_element(n, m, cplx{0.0, eta});
}

CMatrix displacement_matrix(const FockSpace& fock, cplx alpha) {
  CMatrix d(fock.size(), fock.size());
  for (int i = 0; i < fock.size(); ++i)
    for (int j = 0; j < fock.size(); ++j)
      d(i, j) = displacement_element(fock.floor() + i, fock.floor() + j, alpha);
  return d;
}

int thermal_cutoff(double mean_n, double tail) {
  if (mean_n < 0.0) throw std::invalid_argument("thermal_cutoff: mean_n must be >= 0");
  if (mean_n == 0.0) return 1;
  // tail above cutoff c is q^(c+1), q = nbar/(nbar+1)
  const double q = mean_n / (mean_n + 1.0);
  const int c = static_cast<int>(std::ceil(std::log(tail) / std::log(q))) - 1;
  int cutoff = std::max(1, c);
  while (std::pow(q, cutoff + 1) >= tail) ++cutoff;
  return cutoff;
}

ThermalDistribution thermal_dist(double mean_n, int cutoff) {
  if (mean_n < 0.0) throw std::invalid_argument("thermal_dist: mean_n must be >= 0");
  if (cutoff < 0) throw std::invalid_argument("thermal_dist: cutoff must be >= 0");
  ThermalDistribution dist;
  dist.mean_n = mean_n;
  const double q = mean_n / (mean_n + 1.0);
  dist.tail_mass = mean_n == 0.0 ? 0.0 : std::pow(q, cutoff + 1);
  if (dist.tail_mass >= kTailTolerance)
    throw std::invalid_argument("thermal_dist: cutoff " + std::to_string(cutoff) +
                                " leaves tail mass " + std::to_string(dist.tail_mass));
  dist.probs.resize(cutoff + 1);
  double pn = 1.0 / (mean_n + 1.0);
  for (int n = 0; n <= cutoff; ++n) {
    dist.probs[n] = pn / (1.0 - dist.tail_mass);
    pn *= q;
  }
  double m1 = 0.0, m2 = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    m1 += n * dist.probs[n];
    m2 += static_cast<double>(n) * n * dist.probs[n];
  }
  dist.mean = m1;
  dist.variance = m2 - m1 * m1;
  return dist;
}

int choose_cutoff(const TrapParams& params, double mean_n) {
  const double gap = std::abs(params.sideband_gap());
  const double excursion =
      gap > 0.0 ? 4.0 * std::sqrt(static_cast<double>(params.n_ions)) * params.lamb_dicke *
                      params.rabi_freq / gap
                : 0.0;
  const int by_orbit = static_cast<int>(std::ceil(mean_n + 10.0 + std::ceil(excursion)));
  return std::max(thermal_cutoff(mean_n), by_orbit);
}

// --- StateVector -----------------------------------------------------------

StateVector::StateVector(int n_ions, FockSpace fock)
    : n_ions_(n_ions), fock_(fock), amp_(CVector::Zero((1 << n_ions) * fock.size())) {
  if (n_ions < 1 || n_ions > kMaxIons) throw std::invalid_argument("StateVector: bad n_ions");
}

StateVector::StateVector(int n_ions, FockSpace fock, CVector amplitudes)
    : n_ions_(n_ions), fock_(fock), amp_(std::move(amplitudes)) {
  if (n_ions < 1 || n_ions > kMaxIons) throw std::invalid_argument("StateVector: bad n_ions");
  if (amp_.size() != (1 << n_ions) * fock.size())
    throw std::invalid_argument("StateVector: amplitude length does not match basis");
}

StateVector StateVector::basis(int n_ions, const FockSpace& fock, int spin, int n) {
  if (!fock.contains(n)) throw std::invalid_argument("StateVector::basis: level outside window");
  StateVector s(n_ions, fock);
  if (spin < 0 || spin >= s.spin_dim()) throw std::invalid_argument("StateVector::basis: bad spin");
  s.amp_(spin + s.spin_dim() * (n - fock.floor())) = 1.0;
  return s;
}

Eigen::Map<const CMatrix> StateVector::as_matrix() const {
  return {amp_.data(), spin_dim(), fock_.size()};
}

Eigen::Map<CMatrix> StateVector::as_matrix() { return {amp_.data(), spin_dim(), fock_.size()}; }

CMatrix StateVector::reduced_spin() const {
  const auto m = as_matrix();
  return m * m.adjoint();
}

RVector StateVector::fock_populations() const {
  return as_matrix().cwiseAbs2().colwise().sum().transpose();
}

namespace {
double guard_mass(const RVector& pops, const FockSpace& fock) {
  const int g = fock.guard_levels();
  double mass = pops.tail(g).sum();
  if (fock.floor() > 0) mass += pops.head(g).sum();
  return mass;
}
}  // namespace

double StateVector::edge_mass() const { return guard_mass(fock_populations(), fock_); }

// --- DensityOperator -------------------------------------------------------

DensityOperator::DensityOperator(int n_ions, FockSpace fock)
    : n_ions_(n_ions), fock_(fock) {
  const int d = (1 << n_ions) * fock.size();
  rho_ = CMatrix::Zero(d, d);
}

DensityOperator::DensityOperator(int n_ions, FockSpace fock, CMatrix rho)
    : n_ions_(n_ions), fock_(fock), rho_(std::move(rho)) {
  const int d = (1 << n_ions) * fock.size();
  if (rho_.rows() != d || rho_.cols() != d)
    throw std::invalid_argument("DensityOperator: matrix size does not match basis");
}

DensityOperator DensityOperator::ground_spins_thermal(int n_ions, const FockSpace& fock,
                                                      const ThermalDistribution& dist) {
  DensityOperator op(n_ions, fock);
  const int s = op.spin_dim();
  for (int n = fock.floor(); n <= std::min(fock.cutoff(), dist.cutoff()); ++n) {
    const int b = s * (n - fock.floor());
    op.rho_(b, b) = dist.probs[n];
  }
  return op;
}

CMatrix DensityOperator::reduced_spin() const {
  const int s = spin_dim();
  CMatrix out = CMatrix::Zero(s, s);
  for (int f = 0; f < fock_.size(); ++f) out += rho_.block(s * f, s * f, s, s);
  return out;
}

RVector DensityOperator::fock_populations() const {
  const int s = spin_dim();
  RVector pops(fock_.size());
  for (int f = 0; f < fock_.size(); ++f)
    pops(f) = rho_.diagonal().segment(s * f, s).real().sum();
  return pops;
}

double DensityOperator::edge_mass() const { return guard_mass(fock_populations(), fock_); }

CVector ghz_target(int n_ions) {
  CVector t = CVector::Zero(1 << n_ions);
  t(0) = 1.0 / std::sqrt(2.0);
  t((1 << n_ions) - 1) = -kI / std::sqrt(2.0);
  return t;
}

double ghz_fidelity(const CMatrix& rho_spin) {
  int n = 0;
  while ((1 << n) < rho_spin.rows()) ++n;
  const CVector t = ghz_target(n);
  return (t.adjoint() * rho_spin * t)(0, 0).real();
}

}  // namespace iongate::hilbert
