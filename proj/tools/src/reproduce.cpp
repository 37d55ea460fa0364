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

#include "iongate/cli/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iongate/analytic.hpp"
#include "iongate/dynamics.hpp"
#include "iongate/fidelity.hpp"
#include "iongate/hilbert.hpp"
#include "iongate/modes.hpp"

namespace iongate::cli {

using nlohmann::json;

namespace {

constexpr double kMHz = 1e6;

TrapParams trap(int n, double delta, double eta, double omega) {
  TrapParams p;
  p.n_ions = n;
  p.detuning = delta;
  p.lamb_dicke = eta;
  p.rabi_freq = omega;
  return p;
}

json trap_json(const TrapParams& p) {
  return {{"ions", p.n_ions}, {"detuning", p.detuning}, {"lamb_dicke", p.lamb_dicke},
          {"rabi_freq", p.rabi_freq}};
}

json report_json(const dynamics::RunReport& r) {
  return {{"step", r.step}, {"refinements", r.refinements}, {"max_norm_drift", r.max_norm_drift},
          {"max_edge_mass", r.max_edge_mass}};
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) t[j] = a + (b - a) * j / (n - 1);
  return t;
}

void add_elements(std::vector<double>& row, const CMatrix& rho) {
  const auto k = rho.rows() - 1;
  row.insert(row.end(), {rho(0, 0).real(), rho(0, k).imag(), rho(k, k).real(), rho(0, k).real()});
}

const std::vector<std::string> kElementNames{"rho_gg_gg", "im_rho_gg_ee", "rho_ee_ee",
                                             "re_rho_gg_ee"};

std::vector<std::string> prefixed(const std::string& p) {
  std::vector<std::string> out;
  for (const auto& n : kElementNames) out.push_back(p + n);
  return out;
}

// Analytic density elements next to an ensemble oracle on the same grid.
Reproduction two_ion_elements(const std::string& target, const TrapParams& p, int K,
                              dynamics::Variant variant, int samples) {
  const double nbar = 2.0;
  const double tau = analytic::gate_schedule(p, K).tau;
  const auto times = linspace(0.0, tau, samples);
  const auto dist = hilbert::thermal_dist(nbar, hilbert::thermal_cutoff(nbar));
  const auto oracle = dynamics::evolve_thermal({variant, p}, nbar, times);

  std::vector<std::string> obs = prefixed("analytic_");
  const auto orc = prefixed("oracle_");
  obs.insert(obs.end(), orc.begin(), orc.end());
  obs.insert(obs.end(), {"analytic_epr", "oracle_epr"});
  TraceTable table(obs, kMHz);
  double max_dev = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const CMatrix a = analytic::density_elements(p, times[j], dist);
    std::vector<double> row;
    add_elements(row, a);
    add_elements(row, oracle.spin[j]);
    row.push_back(analytic::epr_population(a));
    row.push_back(analytic::epr_population(oracle.spin[j]));
    for (int i = 0; i < 4; ++i) max_dev = std::max(max_dev, std::abs(row[i] - row[i + 4]));
    table.add_sample(times[j], row);
  }
  Reproduction r{target, {}, json::object()};
  r.summary = {{"trap", trap_json(p)},
               {"loops", K},
               {"tau_nu", tau},
               {"initial_thermal", nbar},
               {"oracle_variant", dynamics::to_string(variant)},
               {"oracle", report_json(oracle.report)},
               {"max_element_deviation", max_dev},
               {"epr_at_tau_analytic", table.at(table.rows() - 1, "analytic_epr")},
               {"epr_at_tau_oracle", table.at(table.rows() - 1, "oracle_epr")}};
  r.tables.emplace_back(target, std::move(table));
  return r;
}

}  // namespace

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> t{"table1", "table2", "fig3a", "fig3b",
                                          "fig4",   "fig5",   "fig6"};
  return t;
}

Reproduction reproduce(const std::string& target) {
  if (target == "table1") return reproduce_table1();
  if (target == "table2") return reproduce_table2();
  if (target == "fig3a") return reproduce_fig3a();
  if (target == "fig3b") return reproduce_fig3b();
  if (target == "fig4") return reproduce_fig4();
  if (target == "fig5") return reproduce_fig5();
  if (target == "fig6") return reproduce_fig6();
  throw std::invalid_argument("unknown reproduce target '" + target + "'");
}

Reproduction reproduce_table1() {
  const double eta = 0.1;
  Table t({"rabi_over_nu", "trap_hz", "gate_time_seconds", "gate_time_us"});
  for (double ratio : {0.05, 0.10, 0.20}) {
    for (double f : {0.5 * kMHz, 1.0 * kMHz, 10.0 * kMHz}) {
      const double omega = 2.0 * kPi * f * ratio;  // angular, 1/s
      const double tau = analytic::gate_time(eta, omega, 1);
      t.add_row({ratio, f, tau, tau * 1e6});
    }
  }
  Reproduction r{"table1", {}, {{"lamb_dicke", eta}, {"loops", 1}}};
  r.tables.emplace_back("table1", std::move(t));
  return r;
}

Reproduction reproduce_table2() {
  // delta = 0.95, eta = 0.1 trap, resonant Omega for K = 2, heating with
  // Gamma (1 + 2 n_th) tau = 0.01.
  const int K = 2;
  const double nbar1 = 2.0;
  Table t({"ions", "carrier", "lamb_dicke", "spectator_direct", "debye_waller", "heating", "total",
           "spectator_direct_sum", "debye_waller_sum"});
  json rows = json::array();
  for (int n = 2; n <= 10; ++n) {
    TrapParams p = trap(n, 0.95, 0.1, 0.0);
    p.rabi_freq = analytic::resonant_rabi_freq(p, K);
    const double tau = analytic::gate_schedule(p, K).tau;
    const dynamics::HeatingParams heat{0.01 / tau, 0.0};
    const auto rep = fidelity::budget(p, modes::solve_chain(n), nbar1, heat, K);
    t.add_row({double(n), rep.carrier, rep.lamb_dicke, rep.spectator_direct, rep.debye_waller,
               rep.heating, rep.total, rep.spectator_direct_sum, rep.debye_waller_sum});
    json terms = json::object();
    for (const auto& term : rep.terms()) terms[term.key] = term.formula;
    rows.push_back({{"ions", n}, {"rabi_freq", p.rabi_freq}, {"tau_nu", tau}, {"formulas", terms}});
  }
  Reproduction r{"table2", {}, {{"loops", K}, {"nbar1", nbar1}, {"heating_gamma_tau", 0.01},
                                {"rows", rows}}};
  r.tables.emplace_back("table2", std::move(t));
  return r;
}

Reproduction reproduce_fig3a() {
  // Weak field: eta Omega / (nu - delta) = 0.1 closes after K = 25 loops.
  return two_ion_elements("fig3a", trap(2, 0.9, 0.1, 0.1), 25, dynamics::Variant::XP, 401);
}

Reproduction reproduce_fig3b() {
  return two_ion_elements("fig3b", trap(2, 0.95, 0.1, 0.177), 2, dynamics::Variant::RwaLambDicke,
                          401);
}

Reproduction reproduce_fig4() {
  const TrapParams p = trap(2, 0.95, 0.1, 0.177);
  const double nbar = 2.0;
  const double tau = analytic::gate_schedule(p, 2).tau;
  const auto times = linspace(tau - 10.0, tau + 10.0, 81);
  const auto dist = hilbert::thermal_dist(nbar, hilbert::thermal_cutoff(nbar));
  const auto oracle = dynamics::evolve_thermal({dynamics::Variant::Full, p}, nbar, times);
  TraceTable t({"oracle_full", "eq10_epr", "carrier_factor", "product"}, kMHz);
  double near = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double epr10 = analytic::epr_population(analytic::density_elements(p, times[j], dist));
    const double carrier = fidelity::carrier_fidelity(p, 2, times[j]).instantaneous;
    const double full = analytic::epr_population(oracle.spin[j]);
    if (std::abs(times[j] - tau) <= 5.0) near = std::max(near, std::abs(full - epr10 * carrier));
    t.add_sample(times[j], {full, epr10, carrier, epr10 * carrier});
  }
  Reproduction r{"fig4", {}, json::object()};
  r.summary = {{"trap", trap_json(p)},
               {"tau_nu", tau},
               {"initial_thermal", nbar},
               {"oracle", report_json(oracle.report)},
               {"max_deviation_within_5_of_tau", near},
               {"average_carrier_loss", fidelity::carrier_fidelity(p, 2, tau).average_loss}};
  r.tables.emplace_back("fig4", std::move(t));
  return r;
}

Reproduction reproduce_fig5() {
  const TrapParams p = trap(2, 0.9, 0.2, 0.02);
  const double nbar = 5.0;
  const auto dist = hilbert::thermal_dist(nbar, hilbert::thermal_cutoff(nbar));
  const double w = std::abs(fidelity::effective_rabi(p, 0).base);
  const double period = 2.0 * kPi / p.detuning;
  const long last = static_cast<long>(std::ceil(2.6 / (w * period)));
  std::vector<double> times;
  const int n = 131;
  for (int j = 0; j < n; ++j) times.push_back(period * std::round(double(j) * last / (n - 1)));
  dynamics::EnsembleOptions opt;
  opt.ensemble_tail = 1e-4;
  const auto oracle = dynamics::evolve_thermal({dynamics::Variant::Full, p}, nbar, times, opt);

  TraceTable t({"omega_tilde_t", "prediction", "oracle_full", "corrected"}, kMHz);
  double dev = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double pred = fidelity::lamb_dicke_fidelity(p, 2, dist, times[j]).exact;
    const double corr = fidelity::lamb_dicke_fidelity(p, 2, dist, times[j], {true}).exact;
    const double full = analytic::epr_population(oracle.spin[j]);
    if (w * times[j] <= 2.5) dev = std::max(dev, std::abs(full - corr));
    t.add_sample(times[j], {w * times[j], pred, full, corr});
  }
  const auto peak = fidelity::optimum_time(p, 2, dist, 0.5 / w, 3.0 / w);
  Reproduction r{"fig5", {}, json::object()};
  r.summary = {{"trap", trap_json(p)},
               {"initial_thermal", nbar},
               {"omega_tilde", w},
               {"prediction_peak", peak.fidelity},
               {"prediction_peak_omega_tilde_t", peak.time * w},
               {"lowest_order", fidelity::lamb_dicke_fidelity(p, 2, dist, 0.0).lowest_order},
               {"max_oracle_vs_corrected", dev},
               {"oracle", report_json(oracle.report)},
               {"oracle_dropped_weight", oracle.dropped_weight}};
  r.tables.emplace_back("fig5", std::move(t));
  return r;
}

Reproduction reproduce_fig6() {
  Table t({"ions", "sigma1", "sigma2", "sigma3", "sigma4", "sigma5", "sigma6"});
  for (int n = 2; n <= 10; ++n) {
    const auto s = modes::sigma_sums(modes::solve_chain(n));
    t.add_row({double(n), s[1], s[2], s[3], s[4], s[5], s[6]});
  }
  Reproduction r{"fig6", {}, {{"ions", {2, 10}}}};
  r.tables.emplace_back("fig6", std::move(t));
  return r;
}

Table modes_table(int n_ions) {
  const auto m = modes::solve_chain(n_ions);
  std::vector<std::string> cols{"mode", "freq"};
  for (int i = 1; i <= n_ions; ++i) cols.push_back("b" + std::to_string(i));
  Table t(cols);
  for (int l = 0; l < n_ions; ++l) {
    std::vector<double> row{double(l + 1), m.freqs[l]};
    for (int i = 0; i < n_ions; ++i) row.push_back(m.vectors(i, l));
    t.add_row(row);
  }
  return t;
}

Table sums_table(int n_ions) {
  const auto s = modes::sigma_sums(modes::solve_chain(n_ions));
  Table t({"k", "sigma"});
  for (int k = 1; k <= 6; ++k) t.add_row({double(k), s[k]});
  return t;
}

}  // namespace iongate::cli
