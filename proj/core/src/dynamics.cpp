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

#include "iongate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "linalg.hpp"

namespace iongate::dynamics {
namespace {

using hilbert::DensityOperator;
using hilbert::FockSpace;
using hilbert::StateVector;
using Triplet = Eigen::Triplet<cplx>;

constexpr double kPrune = 1e-14;

// (spin) x (fock) on the product basis, index = s + S * f.
SparseOp kron(const SparseOp& spin, const CMatrix& fock_op) {
  const int s = static_cast<int>(spin.rows());
  const int nf = static_cast<int>(fock_op.rows());
  std::vector<Triplet> entries;
  for (int f = 0; f < nf; ++f)
    for (int g = 0; g < nf; ++g) {
      const cplx b = fock_op(f, g);
      if (std::abs(b) <= kPrune) continue;
      for (int k = 0; k < spin.outerSize(); ++k)
        for (SparseOp::InnerIterator it(spin, k); it; ++it)
          entries.emplace_back(it.row() + s * f, it.col() + s * g, it.value() * b);
    }
  SparseOp out(s * nf, s * nf);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

// p^T op p, for an isometry p onto an invariant subspace.
SparseOp project(const SparseOp& op, const RMatrix& p) {
  const CMatrix pc = p.cast<cplx>();
  const CMatrix small = pc.adjoint() * (op * pc);
  return small.sparseView(1.0, kPrune);
}

int steps_for(double span, double h) {
  return std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Classic fourth-order Runge-Kutta for dx/dt = deriv(t, x).
template <typename Deriv>
class Rk4 {
 public:
  explicit Rk4(Deriv deriv) : deriv_(std::move(deriv)) {}

  void step(double t, double dt, CMatrix& x) {
    deriv_(t, x, k1_);
    tmp_ = x + (0.5 * dt) * k1_;
    deriv_(t + 0.5 * dt, tmp_, k2_);
    tmp_ = x + (0.5 * dt) * k2_;
    deriv_(t + 0.5 * dt, tmp_, k3_);
    tmp_ = x + dt * k3_;
    deriv_(t + dt, tmp_, k4_);
    x += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  void advance(double t0, double t1, double h, CMatrix& x) {
    if (t1 <= t0) return;
    const int n = steps_for(t1 - t0, h);
    const double dt = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) step(t0 + i * dt, dt, x);
  }

 private:
  Deriv deriv_;
  CMatrix k1_, k2_, k3_, k4_, tmp_;
};

auto schrodinger_deriv(const Hamiltonian& h) {
  return [&h](double t, const CMatrix& x, CMatrix& out) {
    h.apply(t, x, out);
    out *= -kI;
  };
}

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("no observer times requested");
  if (times.front() < 0.0) throw std::invalid_argument("observer times must be >= 0");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("observer times must be ascending");
}

CMatrix spin_of_column(const CMatrix& x, int col, int spin_dim, int levels) {
  const Eigen::Map<const CMatrix> m(x.col(col).data(), spin_dim, levels);
  return m * m.adjoint();
}

RVector pops_of_column(const CMatrix& x, int col, int spin_dim, int levels) {
  const Eigen::Map<const CMatrix> m(x.col(col).data(), spin_dim, levels);
  return m.cwiseAbs2().colwise().sum().transpose();
}

double guard_mass(const RVector& pops, const FockSpace& fock) {
  const int g = fock.guard_levels();
  double mass = pops.tail(g).sum();
  if (fock.floor() > 0) mass += pops.head(g).sum();
  return mass;
}

// Step doubling: run(h) is trusted once it agrees with run(2h); otherwise h
// is halved and the comparison repeated.
template <typename Run>
auto gated(Run&& run, double h0, const IntegratorOptions& opt, RunReport& report) {
  auto accept = [&](auto& result, double h, int r, double change) {
    if (result.norm_drift > opt.norm_tolerance) return false;
    report.step = h;
    report.refinements = r;
    report.gate_change = change;
    return true;
  };
  if (!opt.convergence_gate) {
    auto only = run(h0);
    if (!accept(only, h0, 0, 0.0))
      throw StepFailure("norm drift " + std::to_string(only.norm_drift) + " exceeds tolerance");
    return only;
  }
  auto prev = run(2.0 * h0);
  double change = 0.0;
  for (int r = 0; r <= opt.max_refinements; ++r) {
    const double h = h0 / std::pow(2.0, r);
    auto cur = run(h);
    change = max_abs(cur.monitored - prev.monitored);
    if (change < opt.tolerance && accept(cur, h, r, change)) return cur;
    prev = std::move(cur);
  }
  throw StepFailure("observable not converged after " + std::to_string(opt.max_refinements) +
                    " step halvings (last change " + std::to_string(change) + ")");
}

CMatrix matrix_power(CMatrix base, long k) {
  CMatrix result = CMatrix::Identity(base.rows(), base.cols());
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

}  // namespace

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NonLambDicke: return "non_lamb_dicke";
    case Variant::RwaLambDicke: return "rwa";
    case Variant::XP: return "xp";
  }
  return "unknown";
}

void HeatingParams::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("heating gamma must be >= 0");
  if (!(n_thermal >= 0.0)) throw std::invalid_argument("heating n_thermal must be >= 0");
}

// --- Hamiltonian -----------------------------------------------------------

Hamiltonian::Hamiltonian(const HamiltonianSpec& spec, const FockSpace& fock, SpinSector sector)
    : spec_(spec), fock_(fock), sector_(sector), n_ions_(spec.params.n_ions) {
  spec.params.validate();
  auto ops = hilbert::build_spin_ops(n_ions_);
  if (sector == SpinSector::Symmetric) {
    const RMatrix p = hilbert::dicke_basis(n_ions_);
    for (SparseOp* op : {&ops.jx, &ops.jy, &ops.jz, &ops.raising, &ops.lowering})
      *op = project(*op, p);
  }
  spin_dim_ = static_cast<int>(ops.jx.rows());
  dim_ = spin_dim_ * fock.size();
  const double eta = spec.params.lamb_dicke;
  const double om = spec.params.rabi_freq;
  const double r2 = std::sqrt(2.0);
  const CMatrix x = fock.position().cast<cplx>();
  const CMatrix id = CMatrix::Identity(fock.size(), fock.size());

  switch (spec.variant) {
    case Variant::Full: {
      const CMatrix d = hilbert::displacement_matrix(fock, cplx{0.0, eta});
      vc_ = cplx{om} * (kron(ops.raising, d) + kron(ops.lowering, d.adjoint()));
      break;
    }
    case Variant::NonLambDicke: {
      const detail::HermitianExp xe(x);
      const CMatrix& q = xe.eigenvectors();
      const RVector arg = r2 * eta * xe.eigenvalues();
      const CMatrix c = q * arg.array().cos().matrix().cast<cplx>().asDiagonal() * q.adjoint();
      const CMatrix s = q * arg.array().sin().matrix().cast<cplx>().asDiagonal() * q.adjoint();
      vc_ = cplx{2.0 * om} * (kron(ops.jx, c) - kron(ops.jy, s));
      break;
    }
    case Variant::RwaLambDicke:
      vc_ = cplx{2.0 * om} * kron(ops.jx, id) - cplx{2.0 * r2 * eta * om} * kron(ops.jy, x);
      break;
    case Variant::XP:
      vc_ = cplx{-r2 * eta * om} * kron(ops.jy, x);
      vs_ = cplx{r2 * eta * om} * kron(ops.jy, fock.momentum());
      has_vs_ = true;
      break;
  }
  vc_.makeCompressed();
  if (has_vs_) vs_.makeCompressed();
  fock_index_.resize(dim_);
  for (int i = 0; i < dim_; ++i) fock_index_(i) = i / spin_dim_;
}

CVector Hamiltonian::frame_phases(double t) const {
  return (kI * (spec_.params.trap_freq * t) * fock_index_.cast<cplx>()).array().exp();
}

void Hamiltonian::apply(double t, const CMatrix& x, CMatrix& out) const {
  const CVector ph = frame_phases(t);
  const CMatrix y = ph.conjugate().asDiagonal() * x;
  const double wt = spec_.params.detuning * t;
  out.noalias() = vc_ * y;
  out *= std::cos(wt);
  if (has_vs_) out.noalias() += std::sin(wt) * (vs_ * y);
  out = ph.asDiagonal() * out;
}

CMatrix Hamiltonian::dense(double t) const {
  CMatrix out;
  apply(t, CMatrix::Identity(dim_, dim_), out);
  return out;
}

double Hamiltonian::max_frequency() const noexcept {
  const auto& p = spec_.params;
  return spec_.variant == Variant::XP ? std::abs(p.trap_freq - p.detuning)
                                      : p.trap_freq + p.detuning;
}

double Hamiltonian::default_step() const noexcept {
  return 2.0 * kPi / (200.0 * max_frequency());
}

double Hamiltonian::period() const noexcept { return 2.0 * kPi / spec_.params.detuning; }

// --- Schrodinger -----------------------------------------------------------

namespace {

struct DirectResult {
  std::vector<CMatrix> samples;  // one column block per observer time
  CMatrix monitored;
  double norm_drift = 0.0;
};

// Marches the columns of x0 through `times`, keeping every sample.
DirectResult march(const Hamiltonian& ham, const CMatrix& x0, const std::vector<double>& times,
                   double h, const std::vector<double>& weights) {
  Rk4 rk(schrodinger_deriv(ham));
  const int s = ham.spin_dim();
  const int levels = ham.fock().size();
  DirectResult res;
  CMatrix x = x0;
  double t = 0.0;
  for (double tj : times) {
    rk.advance(t, tj, h, x);
    t = tj;
    res.samples.push_back(x);
    for (int c = 0; c < x.cols(); ++c)
      res.norm_drift = std::max(res.norm_drift, std::abs(x.col(c).norm() - 1.0));
  }
  res.monitored = CMatrix::Zero(s, s);
  for (int c = 0; c < x.cols(); ++c) res.monitored += weights[c] * spin_of_column(x, c, s, levels);
  return res;
}

}  // namespace

SchrodingerTrace evolve_schrodinger(const HamiltonianSpec& spec, const StateVector& state,
                                    const std::vector<double>& times,
                                    const IntegratorOptions& options) {
  check_times(times);
  if (state.n_ions() != spec.params.n_ions)
    throw std::invalid_argument("evolve_schrodinger: ion count mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("evolve_schrodinger: initial state is not normalized");
  const Hamiltonian ham(spec, state.fock());
  const double h0 = options.step > 0.0 ? options.step : ham.default_step();
  SchrodingerTrace trace;
  const CMatrix x0 = state.amplitudes();
  auto res = gated([&](double h) { return march(ham, x0, times, h, {1.0}); }, h0, options,
                   trace.report);
  trace.report.max_norm_drift = res.norm_drift;
  const double start_edge = state.edge_mass();
  trace.times = times;
  for (auto& col : res.samples) {
    StateVector sv(state.n_ions(), state.fock(), col.col(0));
    const double edge = sv.edge_mass();
    trace.report.max_edge_mass = std::max(trace.report.max_edge_mass, edge);
    if (edge - start_edge > options.truncation_tolerance)
      throw TruncationError("Fock guard band holds " + std::to_string(edge) +
                            "; raise the cutoff");
    trace.states.push_back(std::move(sv));
  }
  return trace;
}

RunReport evolve_schrodinger(const HamiltonianSpec& spec, const StateVector& state,
                             const std::vector<double>& times, const StateObserver& observer,
                             const IntegratorOptions& options) {
  const auto trace = evolve_schrodinger(spec, state, times, options);
  for (std::size_t j = 0; j < trace.times.size(); ++j) observer(trace.times[j], trace.states[j]);
  return trace.report;
}

// --- Ensembles -------------------------------------------------------------

namespace {

struct Members {
  std::vector<int> levels;
  std::vector<double> weights;  // renormalized over the kept members
  int highest = 0;
  double dropped = 0.0;
};

Members select_members(const std::vector<double>& weights, double tail) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("ensemble weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("ensemble weights sum to zero");
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("ensemble weights must sum to 1");
  Members m;
  int top = static_cast<int>(weights.size()) - 1;
  double dropped = 0.0;
  while (top > 0 && dropped + weights[top] <= tail) dropped += weights[top--];
  m.dropped = dropped;
  m.highest = top;
  const double kept = total - dropped;
  for (int n = 0; n <= top; ++n)
    if (weights[n] > 0.0) {
      m.levels.push_back(n);
      m.weights.push_back(weights[n] / kept);
    }
  return m;
}

int default_margin(const TrapParams& p, int highest) {
  const double alpha = p.n_ions * p.lamb_dicke * p.rabi_freq / std::abs(p.sideband_gap());
  return static_cast<int>(
      std::ceil(2.6 * alpha * std::sqrt(std::max(1.0, static_cast<double>(highest))) +
                alpha * alpha + 6.0));
}

FockSpace ensemble_window(int highest, int margin) {
  const int inner = highest + margin + 1;
  const int size = std::max(2, static_cast<int>(std::ceil(inner / 0.9)) + 1);
  return FockSpace(size - 1);
}

struct PeriodicResult {
  CMatrix M;                 // one-period lab-frame propagator
  std::vector<CMatrix> u_at; // U_I(r) at the recorded offsets
  CMatrix monitored;
  double norm_drift = 0.0;
};

struct SampleSink {
  const std::vector<double>& weights;
  const Hamiltonian& ham;
  const RMatrix* to_register;  // Dicke isometry, or null for the full register
  EnsembleTrace& trace;

  void record(std::size_t j, const CMatrix& cols) {
    const int s = ham.spin_dim();
    const FockSpace& fock = ham.fock();
    CMatrix rho = CMatrix::Zero(s, s);
    RVector pops = RVector::Zero(fock.size());
    double edge = 0.0;
    for (int c = 0; c < cols.cols(); ++c) {
      rho += weights[c] * spin_of_column(cols, c, s, fock.size());
      const RVector pc = pops_of_column(cols, c, s, fock.size());
      pops += weights[c] * pc;
      edge += weights[c] * guard_mass(pc, fock);
      trace.report.max_norm_drift =
          std::max(trace.report.max_norm_drift, std::abs(cols.col(c).norm() - 1.0));
    }
    trace.report.max_edge_mass = std::max(trace.report.max_edge_mass, edge);
    if (to_register) {
      const CMatrix p = to_register->cast<cplx>();
      rho = p * rho * p.adjoint();
    }
    trace.spin[j] = std::move(rho);
    trace.fock_pops[j] = std::move(pops);
  }
};

constexpr double kOffsetStoreBytes = 512.0 * 1024 * 1024;

EnsembleTrace run_ensemble_window(const HamiltonianSpec& spec, const Members& members,
                                  const FockSpace& fock, const std::vector<double>& times,
                                  const EnsembleOptions& opt) {
  const int full_dim = 1 << spec.params.n_ions;
  const bool symmetric = opt.symmetric_subspace && spec.params.n_ions > 1 &&
                         (opt.initial_spin == 0 || opt.initial_spin == full_dim - 1);
  const Hamiltonian ham(spec, fock, symmetric ? SpinSector::Symmetric : SpinSector::Full);
  const RMatrix dicke = symmetric ? hilbert::dicke_basis(spec.params.n_ions) : RMatrix();
  const int s = ham.spin_dim();
  const int spin0 = symmetric ? (opt.initial_spin == 0 ? 0 : spec.params.n_ions) : opt.initial_spin;
  const int d = ham.dim();
  const int n0 = static_cast<int>(members.levels.size());
  CMatrix x0 = CMatrix::Zero(d, n0);
  for (int c = 0; c < n0; ++c) x0(spin0 + s * members.levels[c], c) = 1.0;

  EnsembleTrace trace;
  trace.times = times;
  trace.fock = fock;
  trace.highest_level = members.highest;
  trace.dropped_weight = members.dropped;
  trace.spin.resize(times.size());
  trace.fock_pops.resize(times.size());
  SampleSink sink{members.weights, ham, symmetric ? &dicke : nullptr, trace};

  const double h0 = opt.integrator.step > 0.0 ? opt.integrator.step : ham.default_step();
  const double period = ham.period();
  const double t_end = times.back();
  bool periodic = opt.method == EnsembleOptions::Method::Periodic;
  if (opt.method == EnsembleOptions::Method::Auto) periodic = t_end * n0 > 2.0 * d * period;
  trace.periodic = periodic;

  if (!periodic) {
    RunReport rep;
    auto res = gated([&](double h) { return march(ham, x0, times, h, members.weights); }, h0,
                     opt.integrator, rep);
    trace.report = rep;
    for (std::size_t j = 0; j < times.size(); ++j) sink.record(j, res.samples[j]);
    return trace;
  }

  // Split each time into whole periods k and an offset r in [0, T).
  std::vector<long> ks(times.size());
  std::vector<double> rs(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    long k = static_cast<long>(std::floor(times[j] / period + 1e-12));
    double r = times[j] - k * period;
    if (r < 1e-12 * period) r = 0.0;
    if (r > period * (1.0 - 1e-12)) {
      ++k;
      r = 0.0;
    }
    ks[j] = k;
    rs[j] = r;
  }
  std::vector<double> offsets(rs);
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  auto offset_index = [&](double r) {
    return std::lower_bound(offsets.begin(), offsets.end(), r) - offsets.begin();
  };
  const double bytes_u = 16.0 * offsets.size() * d * d;
  const bool keep_offsets = bytes_u <= kOffsetStoreBytes;
  const std::size_t last_offset = offset_index(rs.back());

  auto one_period = [&](double h) {
    Rk4 rk(schrodinger_deriv(ham));
    PeriodicResult res;
    CMatrix u = CMatrix::Identity(d, d);
    CMatrix u_last = u;
    double t = 0.0;
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      if (!keep_offsets && o > last_offset) break;
      rk.advance(t, offsets[o], h, u);
      t = offsets[o];
      if (keep_offsets) res.u_at.push_back(u);
      if (o == last_offset) u_last = u;
    }
    rk.advance(t, period, h, u);
    res.M = ham.frame_phases(period).conjugate().asDiagonal() * u;
    const CMatrix cols = ham.frame_phases(ks.back() * period).asDiagonal() *
                         (u_last * (matrix_power(res.M, ks.back()) * x0));
    res.monitored = CMatrix::Zero(s, s);
    for (int c = 0; c < n0; ++c) {
      res.monitored += members.weights[c] * spin_of_column(cols, c, s, fock.size());
      res.norm_drift = std::max(res.norm_drift, std::abs(cols.col(c).norm() - 1.0));
    }
    return res;
  };

  RunReport rep;
  PeriodicResult acc = gated(one_period, h0, opt.integrator, rep);
  trace.report = rep;

  // Walk the samples in order of k, reusing cached powers M^dk.
  std::vector<std::size_t> by_k(times.size());
  for (std::size_t j = 0; j < by_k.size(); ++j) by_k[j] = j;
  std::stable_sort(by_k.begin(), by_k.end(),
                   [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });
  std::map<long, CMatrix> jumps;
  auto advance_w = [&](CMatrix& w, long& k, long target) {
    if (target <= k) return;
    auto it = jumps.find(target - k);
    if (it == jumps.end()) it = jumps.emplace(target - k, matrix_power(acc.M, target - k)).first;
    w = it->second * w;
    k = target;
  };

  if (keep_offsets) {
    CMatrix w = x0;
    long k = 0;
    for (std::size_t j : by_k) {
      advance_w(w, k, ks[j]);
      sink.record(j, ham.frame_phases(k * period).asDiagonal() * (acc.u_at[offset_index(rs[j])] * w));
    }
    return trace;
  }

  // Too many distinct offsets to hold every U_I(r): keep the M^k states instead
  // and sweep the period once more.
  std::vector<CMatrix> w_at(times.size());
  {
    CMatrix w = x0;
    long k = 0;
    for (std::size_t j : by_k) {
      advance_w(w, k, ks[j]);
      w_at[j] = w;
    }
  }
  std::vector<std::size_t> by_r(times.size());
  for (std::size_t j = 0; j < by_r.size(); ++j) by_r[j] = j;
  std::stable_sort(by_r.begin(), by_r.end(),
                   [&](std::size_t a, std::size_t b) { return rs[a] < rs[b]; });
  Rk4 rk(schrodinger_deriv(ham));
  CMatrix u = CMatrix::Identity(d, d);
  double t = 0.0;
  for (std::size_t j : by_r) {
    rk.advance(t, rs[j], rep.step, u);
    t = rs[j];
    sink.record(j, ham.frame_phases(ks[j] * period).asDiagonal() * (u * w_at[j]));
    w_at[j].resize(0, 0);
  }
  return trace;
}

}  // namespace

EnsembleTrace evolve_ensemble(const HamiltonianSpec& spec, const std::vector<double>& weights,
                              const std::vector<double>& times, const EnsembleOptions& options) {
  check_times(times);
  spec.params.validate();
  if (options.initial_spin < 0 || options.initial_spin >= (1 << spec.params.n_ions))
    throw std::invalid_argument("evolve_ensemble: initial_spin out of range");
  if (!(options.ensemble_tail >= 0.0 && options.ensemble_tail < 0.5))
    throw std::invalid_argument("evolve_ensemble: ensemble_tail must be in [0, 0.5)");
  const Members members = select_members(weights, options.ensemble_tail);
  int margin = options.margin >= 0 ? options.margin : default_margin(spec.params, members.highest);
  for (int attempt = 0;; ++attempt) {
    const FockSpace fock = ensemble_window(members.highest, margin);
    EnsembleTrace trace = run_ensemble_window(spec, members, fock, times, options);
    if (trace.report.max_edge_mass <= options.integrator.truncation_tolerance) return trace;
    if (attempt >= options.max_widenings)
      throw TruncationError("ensemble guard band holds " +
                            std::to_string(trace.report.max_edge_mass) + " at cutoff " +
                            std::to_string(fock.cutoff()));
    margin = 2 * margin + 4;
  }
}

EnsembleTrace evolve_thermal(const HamiltonianSpec& spec, double mean_n,
                             const std::vector<double>& times, const EnsembleOptions& options) {
  if (!(mean_n >= 0.0)) throw std::invalid_argument("evolve_thermal: mean_n must be >= 0");
  const int top = hilbert::thermal_cutoff(mean_n, std::min(options.ensemble_tail, 1e-12));
  std::vector<double> weights(top + 1);
  const double q = mean_n / (mean_n + 1.0);
  double pn = 1.0 / (mean_n + 1.0), sum = 0.0;
  for (int n = 0; n <= top; ++n, pn *= q) sum += (weights[n] = pn);
  for (double& w : weights) w /= sum;
  EnsembleTrace trace = evolve_ensemble(spec, weights, times, options);
  trace.dropped_weight += 1.0 - sum;
  return trace;
}

// --- Lindblad --------------------------------------------------------------

namespace {

// Largest default step as a fraction of the fastest decay time.
constexpr double kDissipativeStepFraction = 0.05;

struct LindbladResult {
  std::vector<CMatrix> samples;
  CMatrix monitored;
  double norm_drift = 0.0;  // trace drift
  double min_eigenvalue = 0.0;
};

}  // namespace

LindbladTrace evolve_lindblad(const HamiltonianSpec& spec, const HeatingParams& heating,
                              const DensityOperator& rho, const std::vector<double>& times,
                              const LindbladOptions& options) {
  check_times(times);
  heating.validate();
  if (rho.n_ions() != spec.params.n_ions)
    throw std::invalid_argument("evolve_lindblad: ion count mismatch");
  const CMatrix& r0 = rho.matrix();
  if (max_abs(r0 - r0.adjoint()) > 1e-12) throw std::invalid_argument("rho is not Hermitian");
  if (std::abs(r0.trace().real() - 1.0) > 1e-9) throw std::invalid_argument("rho trace is not 1");
  {
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(r0, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("rho is not positive semidefinite");
  }

  const Hamiltonian ham(spec, rho.fock());
  const int s = rho.spin_dim();
  const CMatrix a = rho.fock().lowering().cast<cplx>();
  const SparseOp id_spin = [&] {
    SparseOp m(s, s);
    m.setIdentity();
    return m;
  }();
  std::vector<SparseOp> jumps;
  if (heating.gamma > 0.0) {
    jumps.push_back(cplx{std::sqrt(heating.gamma * (1.0 + heating.n_thermal))} *
                    kron(id_spin, a));
    if (heating.n_thermal > 0.0)
      jumps.push_back(cplx{std::sqrt(heating.gamma * heating.n_thermal)} *
                      kron(id_spin, CMatrix(a.adjoint())));
  }
  std::vector<SparseOp> jumps_adj;
  SparseOp loss(ham.dim(), ham.dim());
  for (const auto& c : jumps) {
    jumps_adj.emplace_back(c.adjoint());
    loss += SparseOp(jumps_adj.back() * c);
  }

  auto deriv = [&](double t, const CMatrix& x, CMatrix& out) {
    CMatrix hx;
    ham.apply(t, x, hx);
    out = -kI * (hx - hx.adjoint());
    if (jumps.empty()) return;
    for (std::size_t m = 0; m < jumps.size(); ++m) {
      const CMatrix cx = jumps[m] * x;
      out.noalias() += cx * jumps_adj[m];
    }
    const CMatrix lx = loss * x;
    out -= 0.5 * (lx + lx.adjoint());
  };

  auto run = [&](double h) {
    Rk4 rk(deriv);
    LindbladResult res;
    CMatrix x = r0;
    double t = 0.0;
    for (double tj : times) {
      rk.advance(t, tj, h, x);
      t = tj;
      res.norm_drift = std::max(res.norm_drift, std::abs(x.trace().real() - 1.0));
      res.samples.push_back(x);
    }
    DensityOperator last(rho.n_ions(), rho.fock(), x);
    res.monitored = last.reduced_spin();
    return res;
  };

  IntegratorOptions gate = options.integrator;
  gate.norm_tolerance = options.trace_tolerance;
  double h0 = gate.step > 0.0 ? gate.step : ham.default_step();
  if (gate.step <= 0.0 && !jumps.empty()) {
    // The fastest decay rate is the largest diagonal entry of sum C^dag C.
    double rate = 0.0;
    for (int k = 0; k < loss.outerSize(); ++k)
      for (SparseOp::InnerIterator it(loss, k); it; ++it)
        if (it.row() == it.col()) rate = std::max(rate, std::abs(it.value()));
    if (rate > 0.0) h0 = std::min(h0, kDissipativeStepFraction / rate);
  }
  LindbladTrace trace;
  auto res = gated(run, h0, gate, trace.report);
  trace.report.max_norm_drift = res.norm_drift;
  const double start_edge = rho.edge_mass();
  trace.times = times;
  for (auto& m : res.samples) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < -options.positivity_tolerance)
      throw StepFailure("density operator eigenvalue " + std::to_string(lo) +
                        " violates positivity");
    DensityOperator op(rho.n_ions(), rho.fock(), std::move(m));
    const double edge = op.edge_mass();
    trace.report.max_edge_mass = std::max(trace.report.max_edge_mass, edge);
    if (edge - start_edge > options.integrator.truncation_tolerance)
      throw TruncationError("Fock guard band holds " + std::to_string(edge) +
                            "; raise the cutoff");
    trace.states.push_back(std::move(op));
  }
  return trace;
}

RunReport evolve_lindblad(const HamiltonianSpec& spec, const HeatingParams& heating,
                          const DensityOperator& rho, const std::vector<double>& times,
                          const DensityObserver& observer, const LindbladOptions& options) {
  const auto trace = evolve_lindblad(spec, heating, rho, times, options);
  for (std::size_t j = 0; j < trace.times.size(); ++j) observer(trace.times[j], trace.states[j]);
  return trace.report;
}

// --- Dephasing -------------------------------------------------------------

double dephasing_factor(const HeatingParams& heating, const analytic::PhaseSpaceTrajectory& path,
                        double t, double delta_m) {
  heating.validate();
  double area = 0.0;  // int_0^t (F^2 + G^2)
  if (const auto* c = std::get_if<analytic::CircularSchedule>(&path.schedule())) {
    const auto& p = c->params;
    const double w = p.sideband_gap();
    const double amp = std::sqrt(2.0) * p.lamb_dicke * p.rabi_freq / w;
    area = 2.0 * amp * amp * (t - std::sin(w * t) / w);
  } else {
    // F, G are piecewise linear, so Simpson's rule is exact on each segment.
    const auto& r = std::get<analytic::RectangularSchedule>(path.schedule());
    auto sq = [&](double u) {
      const auto pt = path.at(u);
      return pt.F * pt.F + pt.G * pt.G;
    };
    double a = 0.0;
    while (a < t) {
      const double b = std::min(t, (std::floor(a / r.segment_time + 1e-12) + 1.0) * r.segment_time);
      const double m = 0.5 * (a + b);
      // evaluate just inside the segment to stay on its linear piece
      const double eps = 1e-12 * r.segment_time;
      area += (b - a) / 6.0 * (sq(a + eps) + 4.0 * sq(m) + sq(b - eps));
      a = b;
    }
  }
  return std::exp(-delta_m * delta_m * heating.gamma * (1.0 + 2.0 * heating.n_thermal) * area / 4.0);
}

double dephasing_factor_at_closure(const HeatingParams& heating, int K, double tau, double delta_m) {
  heating.validate();
  if (K < 1) throw std::invalid_argument("dephasing_factor_at_closure: K must be >= 1");
  return std::exp(-delta_m * delta_m * heating.gamma * (1.0 + 2.0 * heating.n_thermal) * tau /
                  (4.0 * K));
}

}  // namespace iongate::dynamics
