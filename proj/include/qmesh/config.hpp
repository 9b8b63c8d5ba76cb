// Copyright 2026 the qmesh authors
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

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmesh/calibration.hpp"
#include "qmesh/error_model.hpp"
#include "qmesh/errors.hpp"
#include "qmesh/randomness.hpp"
#include "qmesh/verifier.hpp"

namespace qmesh {

namespace cfg {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace cfg

enum class CircuitSource { kSxReference, kPlanFile, kUnitaryFile };
enum class SxForm { kOutputPhases, kInnerPhases };
enum class MirrorMode { kAnticorrelated, kIndependent };

struct InputSpec {
  std::optional<std::size_t> basis_mode;      // 0-based
  std::vector<cdouble> amplitudes;            // used when basis_mode is empty

  StateVector state(std::size_t n) const {
    if (basis_mode) return StateVector::basis(n, *basis_mode);
    if (amplitudes.size() != n)
      throw ConfigError("input: amplitude count does not match circuit modes");
    return StateVector{amplitudes};
  }
};

struct GenerateConfig {
  std::vector<double> expected;  // empty = use the nominal circuit's outcome distribution
  BitScheme bit_scheme = BitScheme::kOuter;
  bool von_neumann = false;
  std::size_t borel_max_block = 2;
  std::vector<int> mapping;  // empty = identity
};

struct DatasetConfig {
  InputSpec input;
  std::optional<ArrangementSpec> arrangement;
  std::string counts_file;        // either this ...
  bool simulate = false;          // ... or a synthetic dataset:
  ErrorModel true_model;          //     ground-truth systematics to inject
  std::uint64_t trials = 0;
};

struct CalibrationConfig {
  std::vector<ParamRef> free_parameters;
  std::vector<std::pair<double, double>> bounds;
  std::vector<DatasetConfig> datasets;
  bool emit_corrected_plan = false;
  std::size_t starts = 4;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;
  CircuitSource source = CircuitSource::kSxReference;
  SxForm sx_form = SxForm::kOutputPhases;
  std::string circuit_path;
  InputSpec input;
  ErrorModel model;
  MirrorMode mirror = MirrorMode::kAnticorrelated;
  std::uint64_t trials = 100000;
  Thresholds thresholds;
  std::vector<ArrangementSpec> arrangements;
  std::size_t scan_repeats = 1;
  GenerateConfig generate;
  std::optional<CalibrationConfig> calibration;

  nlohmann::json resolved;  // the config as parsed, embedded into reports
};

namespace cfg {

inline ErrorModel parse_error_model(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"systematic", "jitter", "transmission", "detector_efficiency",
                 "herald_efficiency"},
             where);
  ErrorModel m;
  if (j.contains("systematic")) {
    if (!j["systematic"].is_object()) throw ConfigError(where + ".systematic: expected object");
    for (const auto& [key, val] : j["systematic"].items()) {
      std::size_t gate = 0;
      try {
        gate = std::stoul(key);
      } catch (const std::exception&) {
        throw ConfigError(where + ".systematic: gate key '" + key + "' is not an index");
      }
      check_keys(val, {"theta", "phi", "phases"}, where + ".systematic." + key);
      GateOffset off;
      off.theta = val.value("theta", 0.0);
      off.phi = val.value("phi", 0.0);
      if (val.contains("phases")) off.phases = val["phases"].get<std::vector<double>>();
      m.systematic[gate] = std::move(off);
    }
  }
  if (j.contains("jitter")) {
    check_keys(j["jitter"], {"sigma_theta", "sigma_phi"}, where + ".jitter");
    m.jitter_sigma_theta = j["jitter"].value("sigma_theta", 0.0);
    m.jitter_sigma_phi = j["jitter"].value("sigma_phi", 0.0);
  }
  m.transmission = j.value("transmission", 1.0);
  if (j.contains("detector_efficiency")) {
    if (j["detector_efficiency"].is_number())
      m.detector_efficiency = {j["detector_efficiency"].get<double>()};
    else
      m.detector_efficiency = j["detector_efficiency"].get<std::vector<double>>();
  }
  m.herald_efficiency = j.value("herald_efficiency", 1.0);
  m.validate();
  return m;
}

inline InputSpec parse_input(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"basis_mode", "amplitudes"}, where);
  InputSpec in;
  if (j.contains("basis_mode")) {
    in.basis_mode = j["basis_mode"].get<std::size_t>();
  } else if (j.contains("amplitudes")) {
    for (const auto& cell : j["amplitudes"]) {
      if (!cell.is_array() || cell.size() != 2)
        throw ConfigError(where + ".amplitudes: entries must be [re, im]");
      in.amplitudes.emplace_back(cell[0].get<double>(), cell[1].get<double>());
    }
  } else {
    throw ConfigError(where + ": need basis_mode or amplitudes");
  }
  return in;
}

inline ArrangementSpec parse_arrangement(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"style", "copies", "independent_errors", "permutation"}, where);
  ArrangementSpec spec;
  const std::string style = j.at("style").get<std::string>();
  if (style == "mirrors_at_back")
    spec.style = ArrangementStyle::kMirrorsAtBack;
  else if (style == "alternating")
    spec.style = ArrangementStyle::kAlternating;
  else if (style == "even_self_adjoint")
    spec.style = ArrangementStyle::kEvenSelfAdjoint;
  else if (style == "permutation")
    spec.style = ArrangementStyle::kExplicitPermutation;
  else
    throw ConfigError(where + ": unknown style '" + style + "'");
  spec.copies = j.at("copies").get<std::size_t>();
  spec.independent_errors = j.value("independent_errors", false);
  if (j.contains("permutation")) {
    for (const auto& s : j["permutation"]) {
      check_keys(s, {"copy", "mirrored"}, where + ".permutation[]");
      spec.permutation.push_back(
          {s.at("copy").get<std::size_t>(), s.at("mirrored").get<bool>()});
    }
  }
  if (spec.style == ArrangementStyle::kExplicitPermutation && spec.permutation.empty())
    throw ConfigError(where + ": permutation style needs a permutation list");
  return spec;
}

inline Thresholds parse_thresholds(const nlohmann::json& j, const std::string& where) {
  check_keys(j,
             {"identity_deviation", "unitarity_deviation", "recovery_fidelity", "visibility_raw",
              "self_adjoint_deviation", "sharpness_offdiag", "min_clicks_per_mode",
              "max_offmode_rate", "significance", "statistical_checks"},
             where);
  Thresholds t;
  t.identity_deviation = j.value("identity_deviation", t.identity_deviation);
  t.unitarity_deviation = j.value("unitarity_deviation", t.unitarity_deviation);
  t.recovery_fidelity = j.value("recovery_fidelity", t.recovery_fidelity);
  t.visibility_raw = j.value("visibility_raw", t.visibility_raw);
  t.self_adjoint_deviation = j.value("self_adjoint_deviation", t.self_adjoint_deviation);
  t.sharpness_offdiag = j.value("sharpness_offdiag", t.sharpness_offdiag);
  t.min_clicks_per_mode = j.value("min_clicks_per_mode", t.min_clicks_per_mode);
  t.max_offmode_rate = j.value("max_offmode_rate", t.max_offmode_rate);
  t.significance = j.value("significance", t.significance);
  t.statistical_checks = j.value("statistical_checks", t.statistical_checks);
  return t;
}

inline ParamRef parse_param(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"gate", "which", "phase_index"}, where);
  ParamRef p;
  p.gate = j.at("gate").get<std::size_t>();
  const std::string which = j.at("which").get<std::string>();
  if (which == "theta")
    p.which = ParamRef::Which::kTheta;
  else if (which == "phi")
    p.which = ParamRef::Which::kPhi;
  else if (which == "phase")
    p.which = ParamRef::Which::kPhase;
  else
    throw ConfigError(where + ": unknown parameter kind '" + which + "'");
  if (p.which == ParamRef::Which::kPhase) p.phase_index = j.at("phase_index").get<std::size_t>();
  return p;
}

inline CalibrationConfig parse_calibration(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"free_parameters", "bounds", "datasets", "emit_corrected_plan", "starts"}, where);
  CalibrationConfig c;
  for (const auto& p : j.at("free_parameters"))
    c.free_parameters.push_back(parse_param(p, where + ".free_parameters[]"));
  for (const auto& b : j.at("bounds")) {
    if (!b.is_array() || b.size() != 2)
      throw ConfigError(where + ".bounds: entries must be [lo, hi]");
    c.bounds.emplace_back(b[0].get<double>(), b[1].get<double>());
  }
  for (const auto& d : j.at("datasets")) {
    check_keys(d, {"input", "arrangement", "counts_file", "simulate"}, where + ".datasets[]");
    DatasetConfig ds;
    ds.input = parse_input(d.at("input"), where + ".datasets[].input");
    if (d.contains("arrangement"))
      ds.arrangement = parse_arrangement(d["arrangement"], where + ".datasets[].arrangement");
    if (d.contains("counts_file")) ds.counts_file = d["counts_file"].get<std::string>();
    if (d.contains("simulate")) {
      check_keys(d["simulate"], {"trials", "systematic", "jitter", "transmission",
                                 "detector_efficiency", "herald_efficiency"},
                 where + ".datasets[].simulate");
      ds.simulate = true;
      ds.trials = d["simulate"].at("trials").get<std::uint64_t>();
      nlohmann::json model = d["simulate"];
      model.erase("trials");
      ds.true_model = parse_error_model(model, where + ".datasets[].simulate");
    }
    if (!ds.simulate && ds.counts_file.empty())
      throw ConfigError(where + ".datasets[]: need counts_file or simulate");
    if (ds.simulate && !ds.counts_file.empty())
      throw ConfigError(where + ".datasets[]: counts_file and simulate are exclusive");
    c.datasets.push_back(std::move(ds));
  }
  c.emit_corrected_plan = j.value("emit_corrected_plan", false);
  c.starts = j.value("starts", std::size_t{4});
  if (c.datasets.empty()) throw ConfigError(where + ": need at least one dataset");
  return c;
}

}  // namespace cfg

inline RunConfig parse_config(const nlohmann::json& j) {
  cfg::check_keys(j,
                  {"seed", "circuit", "input", "error_model", "mirror", "trials", "thresholds",
                   "arrangements", "scan_repeats", "generate", "calibration"},
                  "config");
  RunConfig rc;
  rc.resolved = j;
  if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("circuit")) {
    cfg::check_keys(j["circuit"], {"source", "path", "form"}, "config.circuit");
    const std::string src = j["circuit"].value("source", "sx_reference");
    if (src == "sx_reference")
      rc.source = CircuitSource::kSxReference;
    else if (src == "plan_file")
      rc.source = CircuitSource::kPlanFile;
    else if (src == "unitary_file")
      rc.source = CircuitSource::kUnitaryFile;
    else
      throw ConfigError("config.circuit: unknown source '" + src + "'");
    rc.circuit_path = j["circuit"].value("path", "");
    if (rc.source != CircuitSource::kSxReference && rc.circuit_path.empty())
      throw ConfigError("config.circuit: source '" + src + "' needs a path");
    const std::string form = j["circuit"].value("form", "output_phases");
    if (form == "output_phases")
      rc.sx_form = SxForm::kOutputPhases;
    else if (form == "inner_phases")
      rc.sx_form = SxForm::kInnerPhases;
    else
      throw ConfigError("config.circuit: unknown form '" + form + "'");
  }

  if (j.contains("input"))
    rc.input = cfg::parse_input(j["input"], "config.input");
  else
    rc.input.basis_mode = 0;

  if (j.contains("error_model"))
    rc.model = cfg::parse_error_model(j["error_model"], "config.error_model");

  if (j.contains("mirror")) {
    const std::string m = j["mirror"].get<std::string>();
    if (m == "anticorrelated")
      rc.mirror = MirrorMode::kAnticorrelated;
    else if (m == "independent")
      rc.mirror = MirrorMode::kIndependent;
    else
      throw ConfigError("config.mirror: unknown mode '" + m + "'");
  }

  rc.trials = j.value("trials", std::uint64_t{100000});
  if (j.contains("thresholds"))
    rc.thresholds = cfg::parse_thresholds(j["thresholds"], "config.thresholds");
  if (j.contains("arrangements"))
    for (const auto& a : j["arrangements"])
      rc.arrangements.push_back(cfg::parse_arrangement(a, "config.arrangements[]"));
  rc.scan_repeats = j.value("scan_repeats", std::size_t{1});
  if (rc.scan_repeats < 1) throw ConfigError("config.scan_repeats: must be >= 1");

  if (j.contains("generate")) {
    cfg::check_keys(j["generate"],
                    {"expected", "bit_scheme", "von_neumann", "borel_max_block", "mapping"},
                    "config.generate");
    const auto& g = j["generate"];
    if (g.contains("expected") && !g["expected"].is_string())
      rc.generate.expected = g["expected"].get<std::vector<double>>();
    const std::string scheme = g.value("bit_scheme", "outer");
    if (scheme == "outer")
      rc.generate.bit_scheme = BitScheme::kOuter;
    else if (scheme == "split")
      rc.generate.bit_scheme = BitScheme::kSplit;
    else
      throw ConfigError("config.generate: unknown bit_scheme '" + scheme + "'");
    rc.generate.von_neumann = g.value("von_neumann", false);
    rc.generate.borel_max_block = g.value("borel_max_block", std::size_t{2});
    if (g.contains("mapping")) rc.generate.mapping = g["mapping"].get<std::vector<int>>();
  }

  if (j.contains("calibration"))
    rc.calibration = cfg::parse_calibration(j["calibration"], "config.calibration");

  return rc;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace qmesh
