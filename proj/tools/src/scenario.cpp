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

#include "iongate/cli/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "iongate/analytic.hpp"
#include "iongate/dynamics.hpp"
#include "iongate/modes.hpp"

namespace iongate::cli {

using nlohmann::json;

namespace {

std::string repeat(char c, int n) { return std::string(static_cast<std::size_t>(n), c); }

std::vector<std::string> observable_columns(const ScenarioConfig& c) {
  std::vector<std::string> cols;
  const std::string g = repeat('g', c.trap.n_ions), e = repeat('e', c.trap.n_ions);
  for (auto o : c.outputs) {
    switch (o) {
      case Observable::DensityElements:
        cols.insert(cols.end(), {"rho_" + g + "_" + g, "rho_" + e + "_" + e,
                                 "re_rho_" + g + "_" + e, "im_rho_" + g + "_" + e});
        break;
      case Observable::Epr: cols.push_back("epr_population"); break;
      case Observable::GhzFidelity: cols.push_back("ghz_fidelity"); break;
      case Observable::Trajectory: cols.insert(cols.end(), {"F", "G", "A"}); break;
      case Observable::Budget: break;
    }
  }
  return cols;
}

std::vector<double> observable_values(const ScenarioConfig& c, double t, const CMatrix& rho) {
  std::vector<double> v;
  const auto top = rho.rows() - 1;
  for (auto o : c.outputs) {
    switch (o) {
      case Observable::DensityElements:
        v.insert(v.end(), {rho(0, 0).real(), rho(top, top).real(), rho(0, top).real(),
                           rho(0, top).imag()});
        break;
      case Observable::Epr: v.push_back(analytic::epr_population(rho)); break;
      case Observable::GhzFidelity: v.push_back(hilbert::ghz_fidelity(rho)); break;
      case Observable::Trajectory: {
        const auto p = analytic::trajectory(c.trap, t);
        v.insert(v.end(), {p.F, p.G, p.A});
        break;
      }
      case Observable::Budget: break;
    }
  }
  return v;
}

int top_level(const ScenarioConfig& c) {
  return c.initial.kind == InitialState::Kind::Fock ? c.initial.level
                                                    : hilbert::thermal_cutoff(c.initial.mean_n);
}

int auto_cutoff(const ScenarioConfig& c) {
  if (c.cutoff > 0) return c.cutoff;
  double n = c.initial.kind == InitialState::Kind::Fock ? c.initial.level : c.initial.mean_n;
  if (c.engine == Engine::Lindblad && c.heating) n = std::max(n, c.heating->n_thermal);
  return hilbert::choose_cutoff(c.trap, n) +
         (c.initial.kind == InitialState::Kind::Fock ? c.initial.level : 0);
}

json report_json(const dynamics::RunReport& r) {
  return {{"step", r.step},
          {"refinements", r.refinements},
          {"gate_change", r.gate_change},
          {"max_norm_drift", r.max_norm_drift},
          {"max_edge_mass", r.max_edge_mass}};
}

}  // namespace

std::vector<double> sample_times(const ScenarioConfig& c) {
  std::vector<double> t(static_cast<std::size_t>(c.samples));
  for (int j = 0; j < c.samples; ++j) t[j] = c.t_end * j / (c.samples - 1);
  return t;
}

hilbert::ThermalDistribution initial_distribution(const ScenarioConfig& c) {
  if (c.initial.kind == InitialState::Kind::Thermal)
    return hilbert::thermal_dist(c.initial.mean_n, hilbert::thermal_cutoff(c.initial.mean_n));
  hilbert::ThermalDistribution d;
  d.mean_n = d.mean = c.initial.level;
  d.probs.assign(static_cast<std::size_t>(c.initial.level) + 1, 0.0);
  d.probs.back() = 1.0;
  return d;
}

RunResult run_scenario(const ScenarioConfig& c) {
  const auto times = sample_times(c);
  const auto dist = initial_distribution(c);
  RunResult res{TraceTable(observable_columns(c), c.trap_hz), json::object()};
  json numerics = json::object();
  std::vector<CMatrix> spins;
  spins.reserve(times.size());

  switch (c.engine) {
    case Engine::Analytic: {
      if (c.trap.n_ions == 2) {
        for (double t : times) spins.push_back(analytic::density_elements(c.trap, t, dist));
        numerics["method"] = "closed_form";
        break;
      }
      const hilbert::FockSpace fock(auto_cutoff(c));
      const int s = 1 << c.trap.n_ions;
      for (double t : times) {
        CMatrix rho = CMatrix::Zero(s, s);
        for (int n = 0; n <= dist.cutoff(); ++n) {
          if (dist.probs[n] < 1e-14) continue;
          const auto psi = hilbert::StateVector::basis(c.trap.n_ions, fock, 0, n);
          rho += dist.probs[n] * analytic::apply_propagator(c.trap, t, psi).reduced_spin();
        }
        spins.push_back(rho);
      }
      numerics["method"] = "propagator";
      numerics["cutoff"] = fock.cutoff();
      break;
    }
    case Engine::Rwa:
    case Engine::Full: {
      const dynamics::HamiltonianSpec spec{
          c.engine == Engine::Full ? dynamics::Variant::Full : dynamics::Variant::RwaLambDicke,
          c.trap};
      dynamics::EnsembleOptions opt;
      opt.ensemble_tail = c.ensemble_tail;
      dynamics::EnsembleTrace tr;
      if (c.initial.kind == InitialState::Kind::Thermal) {
        tr = dynamics::evolve_thermal(spec, c.initial.mean_n, times, opt);
      } else {
        tr = dynamics::evolve_ensemble(spec, dist.probs, times, opt);
      }
      spins = std::move(tr.spin);
      numerics = report_json(tr.report);
      numerics["method"] = tr.periodic ? "floquet" : "direct";
      numerics["cutoff"] = tr.fock.cutoff();
      numerics["highest_member"] = tr.highest_level;
      numerics["dropped_weight"] = tr.dropped_weight;
      break;
    }
    case Engine::Lindblad: {
      const hilbert::FockSpace fock(std::max(auto_cutoff(c), top_level(c) + 1));
      const auto start = hilbert::thermal_dist(0.0, fock.cutoff());
      hilbert::ThermalDistribution d = start;
      std::fill(d.probs.begin(), d.probs.end(), 0.0);
      for (int n = 0; n <= std::min(dist.cutoff(), fock.cutoff()); ++n) d.probs[n] = dist.probs[n];
      double sum = 0.0;
      for (double p : d.probs) sum += p;
      for (double& p : d.probs) p /= sum;
      const auto rho0 = hilbert::DensityOperator::ground_spins_thermal(c.trap.n_ions, fock, d);
      const auto tr = dynamics::evolve_lindblad({c.lindblad_variant, c.trap},
                                                c.heating.value_or(dynamics::HeatingParams{}),
                                                rho0, times);
      for (const auto& r : tr.states) spins.push_back(r.reduced_spin());
      numerics = report_json(tr.report);
      numerics["method"] = "lindblad_rk4";
      numerics["variant"] = dynamics::to_string(c.lindblad_variant);
      numerics["cutoff"] = fock.cutoff();
      break;
    }
  }

  for (std::size_t j = 0; j < times.size(); ++j)
    res.trace.add_sample(times[j], observable_values(c, times[j], spins[j]));

  json& s = res.summary;
  s["config"] = to_json(c);
  s["input_units"] = c.physical ? "hz" : "nu_units";
  s["columns"] = res.trace.columns();
  s["rows"] = res.trace.rows();
  s["cadence"] = "samples uniform on [0, t_end], both endpoints included";
  s["gate"] = {{"tau_nu", c.duration}, {"tau_seconds", c.duration / (2.0 * kPi * c.trap_hz)}};
  if (c.loops > 0) s["gate"]["resonance_mismatch"] = analytic::resonance_mismatch(c.trap, c.loops);
  s["numerics"] = numerics;
  json last = json::object();
  const auto& cols = res.trace.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) last[cols[i]] = res.trace.row(res.trace.rows() - 1)[i];
  s["final"] = last;
  if (c.wants(Observable::Budget)) s["budget"] = budget_json(scenario_budget(c));
  return res;
}

fidelity::FidelityReport scenario_budget(const ScenarioConfig& c) {
  const modes::ModeSpectrum spectrum =
      c.trap.n_ions >= 2 ? modes::solve_chain(c.trap.n_ions) : modes::ModeSpectrum{};
  const double n1 =
      c.initial.kind == InitialState::Kind::Thermal ? c.initial.mean_n : c.initial.level;
  return fidelity::budget(c.trap, spectrum, n1, c.heating.value_or(dynamics::HeatingParams{}),
                          c.loops, c.budget);
}

json budget_json(const fidelity::FidelityReport& r) {
  return {{"carrier", r.carrier},
          {"lamb_dicke", r.lamb_dicke},
          {"spectator_direct", r.spectator_direct},
          {"debye_waller", r.debye_waller},
          {"heating", r.heating},
          {"total", r.total}};
}

Table budget_table(const fidelity::FidelityReport& r) {
  Table t({"carrier", "lamb_dicke", "spectator_direct", "debye_waller", "heating", "total"});
  t.add_row({r.carrier, r.lamb_dicke, r.spectator_direct, r.debye_waller, r.heating, r.total});
  return t;
}

}  // namespace iongate::cli
