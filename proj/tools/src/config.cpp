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

#include "iongate/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace iongate::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw ConfigError(join(where, k), "unknown key");
  }
}

const json& required(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(where, key), "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
  return v.get<int>();
}

// Exactly one of two unit keys; returns the key used and the value.
std::pair<std::string, double> either(const json& v, const std::string& where, const char* a,
                                      const char* b) {
  only_keys(v, where, {a, b});
  const bool has_a = v.contains(a), has_b = v.contains(b);
  if (has_a == has_b)
    throw ConfigError(where, std::string("give exactly one of '") + a + "' or '" + b + "'");
  const char* key = has_a ? a : b;
  return {key, number(v.at(key), join(where, key))};
}

struct Units {
  bool trap_in_hz = false;
  double trap_hz = 1e6;

  double frequency(const json& v, const std::string& where) const {
    const auto [key, x] = either(v, where, "hz", "nu_units");
    if (key == "nu_units") return x;
    if (!trap_in_hz) throw ConfigError(join(where, "hz"), "needs trap.trap_freq given in hz");
    return x / trap_hz;
  }

  double duration(const json& v, const std::string& where) const {
    const auto [key, x] = either(v, where, "seconds", "nu_units");
    if (key == "nu_units") return x;
    if (!trap_in_hz) throw ConfigError(join(where, "seconds"), "needs trap.trap_freq given in hz");
    return x * 2.0 * kPi * trap_hz;
  }
};

Engine parse_engine(const json& v) {
  if (!v.is_string()) throw ConfigError("engine", "expected a string");
  const auto s = v.get<std::string>();
  if (s == "analytic") return Engine::Analytic;
  if (s == "rwa") return Engine::Rwa;
  if (s == "full") return Engine::Full;
  if (s == "lindblad") return Engine::Lindblad;
  throw ConfigError("engine", "unknown engine '" + s + "' (analytic, rwa, full, lindblad)");
}

dynamics::Variant parse_variant(const json& v) {
  if (!v.is_string()) throw ConfigError("lindblad_variant", "expected a string");
  const auto s = v.get<std::string>();
  for (auto var : {dynamics::Variant::Full, dynamics::Variant::NonLambDicke,
                   dynamics::Variant::RwaLambDicke, dynamics::Variant::XP})
    if (s == dynamics::to_string(var)) return var;
  throw ConfigError("lindblad_variant", "unknown variant '" + s + "'");
}

Observable parse_observable(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "expected a string");
  const auto s = v.get<std::string>();
  for (auto o : {Observable::DensityElements, Observable::Epr, Observable::GhzFidelity,
                 Observable::Trajectory, Observable::Budget})
    if (s == to_string(o)) return o;
  throw ConfigError(where, "unknown observable '" + s + "'");
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Rwa: return "rwa";
    case Engine::Full: return "full";
    case Engine::Lindblad: return "lindblad";
  }
  return "?";
}

std::string to_string(Observable o) {
  switch (o) {
    case Observable::DensityElements: return "density_elements";
    case Observable::Epr: return "epr";
    case Observable::GhzFidelity: return "ghz_fidelity";
    case Observable::Trajectory: return "trajectory";
    case Observable::Budget: return "budget";
  }
  return "?";
}

bool ScenarioConfig::wants(Observable o) const {
  return std::find(outputs.begin(), outputs.end(), o) != outputs.end();
}

ScenarioConfig parse_config(const json& doc) {
  only_keys(doc, "", {"name", "trap", "schedule", "initial", "engine", "lindblad_variant",
                      "heating", "outputs", "sampling", "numerics", "budget_channels"});
  ScenarioConfig c;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("name", "expected a string");
    c.name = doc["name"].get<std::string>();
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("name", "must be a non-empty file-name stem");
  }

  // Trap first: its frequency fixes the unit conversion for everything else.
  const json& trap = required(doc, "", "trap");
  only_keys(trap, "trap",
            {"ions", "trap_freq", "detuning", "rabi_freq", "lamb_dicke", "reference_hz"});
  Units units;
  {
    const auto [key, x] = either(required(trap, "trap", "trap_freq"), "trap.trap_freq", "hz",
                                 "nu_units");
    if (key == "hz") {
      if (!(x > 0.0)) throw ConfigError("trap.trap_freq.hz", "must be positive");
      if (trap.contains("reference_hz"))
        throw ConfigError("trap.reference_hz", "only allowed with trap_freq in nu_units");
      units.trap_in_hz = true;
      units.trap_hz = x;
      c.physical = true;
    } else {
      if (x != 1.0) throw ConfigError("trap.trap_freq.nu_units", "must be 1 in normalized units");
      if (trap.contains("reference_hz")) {
        units.trap_hz = number(trap["reference_hz"], "trap.reference_hz");
        if (!(units.trap_hz > 0.0)) throw ConfigError("trap.reference_hz", "must be positive");
      }
    }
  }
  c.trap_hz = units.trap_hz;
  c.trap.trap_freq = 1.0;
  c.trap.n_ions = integer(required(trap, "trap", "ions"), "trap.ions");
  c.trap.detuning = units.frequency(required(trap, "trap", "detuning"), "trap.detuning");
  c.trap.rabi_freq = units.frequency(required(trap, "trap", "rabi_freq"), "trap.rabi_freq");
  c.trap.lamb_dicke = number(required(trap, "trap", "lamb_dicke"), "trap.lamb_dicke");
  try {
    c.trap.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("trap", e.what());
  }
  if (c.trap.n_ions > 8) throw ConfigError("trap.ions", "simulated registers hold at most 8 ions");

  const json& sched = required(doc, "", "schedule");
  only_keys(sched, "schedule", {"loops", "duration"});
  if (sched.contains("loops") == sched.contains("duration"))
    throw ConfigError("schedule", "give exactly one of 'loops' or 'duration'");
  if (sched.contains("loops")) {
    c.loops = integer(sched["loops"], "schedule.loops");
    if (c.loops < 1) throw ConfigError("schedule.loops", "must be >= 1");
    c.duration = 2.0 * kPi * c.loops / std::abs(1.0 - c.trap.detuning);
  } else {
    c.duration = units.duration(sched["duration"], "schedule.duration");
    if (!(c.duration > 0.0)) throw ConfigError("schedule.duration", "must be positive");
  }

  const json& init = required(doc, "", "initial");
  only_keys(init, "initial", {"thermal", "fock"});
  if (init.contains("thermal") == init.contains("fock"))
    throw ConfigError("initial", "give exactly one of 'thermal' or 'fock'");
  if (init.contains("thermal")) {
    c.initial.kind = InitialState::Kind::Thermal;
    c.initial.mean_n = number(init["thermal"], "initial.thermal");
    if (c.initial.mean_n < 0.0) throw ConfigError("initial.thermal", "must be >= 0");
  } else {
    c.initial.kind = InitialState::Kind::Fock;
    c.initial.level = integer(init["fock"], "initial.fock");
    if (c.initial.level < 0) throw ConfigError("initial.fock", "must be >= 0");
  }

  c.engine = parse_engine(required(doc, "", "engine"));
  if (doc.contains("lindblad_variant")) {
    if (c.engine != Engine::Lindblad)
      throw ConfigError("lindblad_variant", "only meaningful with engine 'lindblad'");
    c.lindblad_variant = parse_variant(doc["lindblad_variant"]);
  }

  if (doc.contains("heating")) {
    const json& h = doc["heating"];
    only_keys(h, "heating", {"gamma", "n_thermal"});
    dynamics::HeatingParams hp;
    hp.gamma = units.frequency(required(h, "heating", "gamma"), "heating.gamma");
    hp.n_thermal = number(required(h, "heating", "n_thermal"), "heating.n_thermal");
    try {
      hp.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("heating", e.what());
    }
    c.heating = hp;
  }

  const json& outs = required(doc, "", "outputs");
  if (!outs.is_array() || outs.empty())
    throw ConfigError("outputs", "expected a non-empty array");
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const std::string where = "outputs[" + std::to_string(i) + "]";
    const Observable o = parse_observable(outs[i], where);
    if (c.wants(o)) throw ConfigError(where, "listed twice");
    c.outputs.push_back(o);
  }
  if (c.wants(Observable::Epr) && c.trap.n_ions != 2)
    throw ConfigError("outputs", "'epr' needs exactly two ions; use 'ghz_fidelity'");
  if (c.wants(Observable::Budget) && c.loops == 0)
    throw ConfigError("outputs", "'budget' needs schedule.loops");

  c.t_end = c.duration;
  if (doc.contains("sampling")) {
    const json& s = doc["sampling"];
    only_keys(s, "sampling", {"samples", "t_end"});
    if (s.contains("samples")) {
      c.samples = integer(s["samples"], "sampling.samples");
      if (c.samples < 2 || c.samples > 1000000)
        throw ConfigError("sampling.samples", "must be in [2, 1000000]");
    }
    if (s.contains("t_end")) {
      c.t_end = units.duration(s["t_end"], "sampling.t_end");
      if (!(c.t_end > 0.0)) throw ConfigError("sampling.t_end", "must be positive");
    }
  }

  if (doc.contains("numerics")) {
    const json& n = doc["numerics"];
    only_keys(n, "numerics", {"ensemble_tail", "cutoff"});
    if (n.contains("ensemble_tail")) {
      c.ensemble_tail = number(n["ensemble_tail"], "numerics.ensemble_tail");
      if (c.ensemble_tail < 0.0 || c.ensemble_tail >= 0.5)
        throw ConfigError("numerics.ensemble_tail", "must be in [0, 0.5)");
    }
    if (n.contains("cutoff")) {
      c.cutoff = integer(n["cutoff"], "numerics.cutoff");
      if (c.cutoff < 1) throw ConfigError("numerics.cutoff", "must be >= 1");
    }
  }
  if (doc.contains("budget_channels")) {
    const json& b = doc["budget_channels"];
    only_keys(b, "budget_channels", {"carrier", "lamb_dicke", "spectator_direct", "debye_waller",
                                     "heating", "resonance_tolerance"});
    auto flag = [&](const char* key, bool& dst) {
      if (!b.contains(key)) return;
      if (!b[key].is_boolean()) throw ConfigError(join("budget_channels", key), "expected a boolean");
      dst = b[key].get<bool>();
    };
    flag("carrier", c.budget.carrier);
    flag("lamb_dicke", c.budget.lamb_dicke);
    flag("spectator_direct", c.budget.spectator_direct);
    flag("debye_waller", c.budget.debye_waller);
    flag("heating", c.budget.heating);
    if (b.contains("resonance_tolerance")) {
      c.budget.resonance_tolerance =
          number(b["resonance_tolerance"], "budget_channels.resonance_tolerance");
      if (!(c.budget.resonance_tolerance >= 0.0))
        throw ConfigError("budget_channels.resonance_tolerance", "must be >= 0");
    }
  }
  return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at), '\n');
    const auto nl = text.rfind('\n', at == 0 ? 0 : at - 1);
    const auto col = nl == std::string::npos ? at + 1 : at - nl;
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col),
                      "malformed JSON");
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["trap"] = {{"ions", c.trap.n_ions},
                 {"trap_freq", {{"nu_units", 1.0}}},
                 {"detuning", {{"nu_units", c.trap.detuning}}},
                 {"rabi_freq", {{"nu_units", c.trap.rabi_freq}}},
                 {"lamb_dicke", c.trap.lamb_dicke},
                 {"reference_hz", c.trap_hz}};
  if (c.loops > 0)
    doc["schedule"] = {{"loops", c.loops}};
  else
    doc["schedule"] = {{"duration", {{"nu_units", c.duration}}}};
  if (c.initial.kind == InitialState::Kind::Thermal)
    doc["initial"] = {{"thermal", c.initial.mean_n}};
  else
    doc["initial"] = {{"fock", c.initial.level}};
  doc["engine"] = to_string(c.engine);
  if (c.engine == Engine::Lindblad) doc["lindblad_variant"] = dynamics::to_string(c.lindblad_variant);
  if (c.heating)
    doc["heating"] = {{"gamma", {{"nu_units", c.heating->gamma}}},
                      {"n_thermal", c.heating->n_thermal}};
  json outs = json::array();
  for (auto o : c.outputs) outs.push_back(to_string(o));
  doc["outputs"] = outs;
  doc["sampling"] = {{"samples", c.samples}, {"t_end", {{"nu_units", c.t_end}}}};
  json numerics = {{"ensemble_tail", c.ensemble_tail}};
  if (c.cutoff > 0) numerics["cutoff"] = c.cutoff;
  doc["numerics"] = numerics;
  doc["budget_channels"] = {{"carrier", c.budget.carrier},
                            {"lamb_dicke", c.budget.lamb_dicke},
                            {"spectator_direct", c.budget.spectator_direct},
                            {"debye_waller", c.budget.debye_waller},
                            {"heating", c.budget.heating},
                            {"resonance_tolerance", c.budget.resonance_tolerance}};
  return doc;
}

}  // namespace iongate::cli
