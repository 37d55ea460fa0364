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

#include "iongate/fidelity.hpp"

#include <algorithm>
#include <cmath>

#include "iongate/analytic.hpp"
#include "iongate/special.hpp"

namespace iongate::fidelity {
namespace {

double far_sideband_factor(const TrapParams& p) {
  return 2.0 * p.trap_freq / (p.trap_freq + p.detuning);
}

// |W_n| for every level of the distribution.
std::vector<double> rates(const TrapParams& params, const hilbert::ThermalDistribution& dist,
                          bool far) {
  std::vector<double> w(dist.probs.size());
  for (std::size_t n = 0; n < w.size(); ++n)
    w[n] = std::abs(effective_rabi(params, static_cast<int>(n), far).exact);
  return w;
}

double ghz_overlap(int n_ions, double phi) {
  cplx sum{};
  for (int k = 0; k <= n_ions; ++k) {
    const double m = 0.5 * n_ions - k;
    sum += special::binomial(n_ions, k) * std::exp(kI * (m * m * phi));
  }
  return std::norm(sum / std::pow(2.0, n_ions));
}

double exact_ghz(int n_ions, const hilbert::ThermalDistribution& dist,
                 const std::vector<double>& w, double t) {
  double f = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n)
    f += dist.probs[n] * ghz_overlap(n_ions, kPi / 2.0 - w[n] * t);
  return f;
}

}  // namespace

EffectiveRabi effective_rabi(const TrapParams& params, int n, bool include_far_sidebands) {
  if (n < 0) throw std::invalid_argument("effective_rabi: n must be >= 0");
  const double eta = params.lamb_dicke;
  const double e2 = eta * eta;
  EffectiveRabi r;
  r.n = n;
  r.base = -(params.rabi_freq * eta) * (params.rabi_freq * eta) / params.sideband_gap();
  const double up = special::laguerre(n, 1, e2);
  r.exact_ratio = std::exp(-e2) * up * up / (n + 1.0);
  if (n > 0) {
    const double down = special::laguerre(n - 1, 1, e2);
    r.exact_ratio -= std::exp(-e2) * down * down / n;
  }
  const double dn = n;
  r.series_ratio = 1.0 - e2 * (2.0 * dn + 1.0) + e2 * e2 * (1.25 * dn * dn + 1.25 * dn + 0.5);
  const double corr = include_far_sidebands ? far_sideband_factor(params) : 1.0;
  r.exact = r.base * r.exact_ratio * corr;
  r.series = r.base * r.series_ratio * corr;
  return r;
}

double laguerre(int n, int alpha, double x) {
  if (n < 0 || alpha < 0) throw std::invalid_argument("laguerre: n and alpha must be >= 0");
  return special::laguerre(n, alpha, x);
}

CarrierFidelity carrier_fidelity(const TrapParams& params, int n_ions, double tau) {
  const double d = params.detuning;
  CarrierFidelity c;
  c.average_loss = n_ions * params.rabi_freq * params.rabi_freq / (2.0 * d * d);
  c.instantaneous = 1.0 - c.average_loss * (1.0 - std::cos(2.0 * d * tau));
  return c;
}

LambDickeFidelity lamb_dicke_fidelity(const TrapParams& params, int n_ions,
                                      const hilbert::ThermalDistribution& dist, double t,
                                      const LambDickeOptions& options) {
  if (n_ions < 1) throw std::invalid_argument("lamb_dicke_fidelity: n_ions must be >= 1");
  const auto w = rates(params, dist, options.include_far_sidebands);
  LambDickeFidelity f;
  f.exact = exact_ghz(n_ions, dist, w, t);
  const double nn = n_ions * (n_ions - 1.0);
  for (std::size_t n = 0; n < w.size(); ++n) {
    const double phi = kPi / 2.0 - w[n] * t;
    f.two_ion += dist.probs[n] * 0.5 * (1.0 + std::sin(w[n] * t));
    f.gaussian += dist.probs[n] / std::sqrt(1.0 + nn * phi * phi / 4.0);
  }
  const double e4 = std::pow(params.lamb_dicke, 4);
  f.lowest_order = 1.0 - kPi * kPi * nn / 8.0 * e4 * dist.variance;
  const double base = std::abs(effective_rabi(params, 0, options.include_far_sidebands).base);
  const double corr = options.include_far_sidebands ? far_sideband_factor(params) : 1.0;
  f.tau_opt = kPi / (2.0 * base * corr) *
              (1.0 + params.lamb_dicke * params.lamb_dicke * (2.0 * dist.mean + 1.0));
  return f;
}

Optimum optimum_time(const TrapParams& params, int n_ions, const hilbert::ThermalDistribution& dist,
                     double t_lo, double t_hi, const LambDickeOptions& options) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("optimum_time: empty interval");
  const auto w = rates(params, dist, options.include_far_sidebands);
  auto f = [&](double t) { return exact_ghz(n_ions, dist, w, t); };
  constexpr int kGrid = 2000;
  int best = 0;
  double best_f = -1.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = f(t_lo + (t_hi - t_lo) * i / kGrid);
    if (v > best_f) best_f = v, best = i;
  }
  const double cell = (t_hi - t_lo) / kGrid;
  double a = std::max(t_lo, t_lo + (best - 1) * cell);
  double b = std::min(t_hi, t_lo + (best + 1) * cell);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

std::vector<double> thermal_occupations(const modes::ModeSpectrum& spectrum, double nbar1) {
  if (!(nbar1 >= 0.0)) throw std::invalid_argument("thermal_occupations: nbar1 must be >= 0");
  std::vector<double> occ(spectrum.n_ions);
  for (int l = 0; l < spectrum.n_ions; ++l) occ[l] = nbar1 / spectrum.freqs(l);
  return occ;
}

SpectatorLosses spectator_fidelity(const modes::ModeSpectrum& spectrum, const TrapParams& params,
                                   const std::vector<double>& occupations) {
  const int n = spectrum.n_ions;
  if (static_cast<int>(occupations.size()) != n)
    throw std::invalid_argument("spectator_fidelity: one occupation per mode required");
  for (double o : occupations)
    if (!(o >= 0.0)) throw std::invalid_argument("spectator_fidelity: occupations must be >= 0");
  const double eta2 = params.lamb_dicke * params.lamb_dicke;
  const double om = params.rabi_freq / params.trap_freq;
  const double pref_direct = eta2 * n * om * om;
  const double pref_dw1 = kPi * kPi * n * (n - 1.0) / 8.0 * eta2 * eta2;
  const double pref_dw2 = kPi * kPi * (n - 2.0) / 16.0 * eta2 * eta2;
  const RVector& r = spectrum.freqs;
  const RMatrix& b = spectrum.vectors;

  SpectatorLosses s;
  for (int l = 1; l < n; ++l) {
    const double r2 = r(l) * r(l);
    s.direct += (2.0 * occupations[l] + 1.0) / r(l) * (r2 + 1.0) / ((r2 - 1.0) * (r2 - 1.0));
  }
  s.direct *= pref_direct;

  double first = 0.0, second = 0.0;
  for (int l = 0; l < n; ++l) {
    const double nl = occupations[l];
    first += (nl * nl + nl) / (r(l) * r(l));
    for (int k = 0; k < n; ++k) {
      const double w =
          (b.col(l).array().square() * b.col(k).array().square()).sum() - 1.0 / n;
      const double moment = l == k ? 2.0 * nl * nl + nl : nl * occupations[k];
      second += w * moment / (r(l) * r(k));
    }
  }
  s.debye_waller = pref_dw1 * first + pref_dw2 * second;

  const double n1 = occupations[0];
  const auto sums = modes::sigma_sums(spectrum);
  s.direct_bound = pref_direct * (n1 * sums[1] + sums[2]);
  s.direct_large_n = pref_direct * 0.8 * (n1 + 1.0);
  s.debye_waller_bound = pref_dw1 * (n1 * n1 * sums[3] + n1 * sums[4]) +
                         pref_dw2 * (n1 * n1 * sums[5] + n1 * sums[6]);
  s.debye_waller_large_n = pref_dw1 * (1.2 * n1 * n1 + 1.4 * n1);
  return s;
}

HeatingFidelity heating_fidelity(const dynamics::HeatingParams& heating, int n_ions, int K,
                                 double tau) {
  heating.validate();
  if (n_ions < 1) throw std::invalid_argument("heating_fidelity: n_ions must be >= 1");
  if (K < 1) throw std::invalid_argument("heating_fidelity: K must be >= 1");
  if (!(tau >= 0.0)) throw std::invalid_argument("heating_fidelity: tau must be >= 0");
  HeatingFidelity h;
  h.x = heating.gamma * (1.0 + 2.0 * heating.n_thermal) * tau / (4.0 * K);
  double sum = 0.0;
  for (int j = 0; j <= n_ions; ++j)
    for (int k = 0; k <= n_ions; ++k)
      sum += special::binomial(n_ions, j) * special::binomial(n_ions, k) *
             std::exp(-double(j - k) * (j - k) * h.x);
  h.exact = sum / std::pow(2.0, 2 * n_ions);
  h.two_ion = 3.0 / 8.0 + 0.5 * std::exp(-h.x) + std::exp(-4.0 * h.x) / 8.0;
  h.many_ion = 1.0 / std::sqrt(1.0 + n_ions * h.x);
  return h;
}

std::vector<FidelityReport::Term> FidelityReport::terms() const {
  return {
      {"carrier", carrier, "N Omega^2 / (2 delta^2)"},
      {"lamb_dicke", lamb_dicke, "eta^4 pi^2 N (N-1) / 8 * Var(n1)"},
      {"spectator_direct", spectator_direct, "N eta^2 Omega^2 / nu^2 * 0.8 (nbar1 + 1)"},
      {"debye_waller", debye_waller, "eta^4 pi^2 N (N-1) / 8 * (0.2 nbar1^2 + 0.4 nbar1)"},
      {"heating", heating, "N gamma (1 + 2 n_th) tau / (8 K)"},
  };
}

FidelityReport budget(const TrapParams& params, const modes::ModeSpectrum& spectrum, double nbar1,
                      const dynamics::HeatingParams& heating, int K,
                      const BudgetOptions& options) {
  params.validate();
  heating.validate();
  if (!(nbar1 >= 0.0)) throw std::invalid_argument("budget: nbar1 must be >= 0");
  const int n = params.n_ions;
  if (n >= 2 && spectrum.n_ions != n)
    throw std::invalid_argument("budget: mode spectrum does not match n_ions");
  const double mismatch = analytic::resonance_mismatch(params, K);
  if (mismatch > options.resonance_tolerance)
    throw InconsistentInput("budget: eta Omega/(nu - delta) misses 1/(2 sqrt K) by " +
                            std::to_string(100.0 * mismatch) + "%");

  FidelityReport rep;
  rep.n_ions = n;
  rep.K = K;
  rep.tau = analytic::gate_schedule(params, K).tau;
  const double eta2 = params.lamb_dicke * params.lamb_dicke;
  const double om = params.rabi_freq / params.trap_freq;
  const double dw = eta2 * eta2 * kPi * kPi * n * (n - 1.0) / 8.0;
  const double var = nbar1 * nbar1 + nbar1;

  if (options.carrier) rep.carrier = carrier_fidelity(params, n, rep.tau).average_loss;
  if (options.lamb_dicke) rep.lamb_dicke = dw * var;
  if (options.spectator_direct) rep.spectator_direct = n * eta2 * om * om * 0.8 * (nbar1 + 1.0);
  if (options.debye_waller) rep.debye_waller = dw * (0.2 * nbar1 * nbar1 + 0.4 * nbar1);
  if (options.heating)
    rep.heating = n * heating.gamma * (1.0 + 2.0 * heating.n_thermal) * rep.tau / (8.0 * K);

  if (n >= 2) {
    const auto s = spectator_fidelity(spectrum, params, thermal_occupations(spectrum, nbar1));
    rep.spectator_direct_sum = options.spectator_direct ? s.direct_bound : 0.0;
    rep.debye_waller_sum = options.debye_waller ? s.debye_waller_bound - dw * var : 0.0;
  }

  const double lost =
      rep.carrier + rep.lamb_dicke + rep.spectator_direct + rep.debye_waller + rep.heating;
  rep.total = std::clamp(1.0 - lost, 0.0, 1.0);
  return rep;
}

}  // namespace iongate::fidelity
