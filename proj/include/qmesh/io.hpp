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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmesh/calibration.hpp"
#include "qmesh/circuit_plan.hpp"
#include "qmesh/errors.hpp"
#include "qmesh/randomness.hpp"
#include "qmesh/verifier.hpp"
#include "qmesh/version.hpp"

namespace qmesh {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// -- circuit plan files -----------------------------------------------------
//
// {"n": 3, "gates": [{"kind":"bs","j":1,"theta":...,"phi":...},
//                    {"kind":"pd","phases":[...]}]}
// j is the 1-based index of the upper mode of the coupled pair (1..n-1).
// Angles are radians; doubles round-trip exactly.

inline json plan_to_json(const CircuitPlan& plan) {
  json gates = json::array();
  for (const auto& g : plan.gates) {
    if (const auto* bs = std::get_if<BeamSplitter>(&g)) {
      gates.push_back({{"kind", "bs"}, {"j", bs->mode + 1}, {"theta", bs->theta}, {"phi", bs->phi}});
    } else {
      gates.push_back({{"kind", "pd"}, {"phases", std::get<PhaseDiagonal>(g).phases}});
    }
  }
  return json{{"n", plan.modes}, {"gates", gates}};
}

inline CircuitPlan plan_from_json(const json& j) {
  try {
    CircuitPlan plan;
    plan.modes = j.at("n").get<std::size_t>();
    for (const auto& g : j.at("gates")) {
      const std::string kind = g.at("kind").get<std::string>();
      if (kind == "bs") {
        const std::size_t one_based = g.at("j").get<std::size_t>();
        if (one_based < 1) throw DataError("plan: beam splitter j must be >= 1");
        plan.gates.push_back(BeamSplitter{one_based - 1, g.at("theta").get<double>(),
                                          g.at("phi").get<double>()});
      } else if (kind == "pd") {
        plan.gates.push_back(PhaseDiagonal{g.at("phases").get<std::vector<double>>()});
      } else {
        throw DataError("plan: unknown gate kind '" + kind + "'");
      }
    }
    validate(plan);
    return plan;
  } catch (const json::exception& e) {
    throw DataError(std::string("plan file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("plan file: ") + e.what());
  }
}

inline std::string plan_to_string(const CircuitPlan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

inline CircuitPlan plan_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("plan file: ") + e.what());
  }
  return plan_from_json(j);
}

// -- unitary matrix files ---------------------------------------------------
//
// {"n": 3, "matrix": [[[re,im], ...], ...]} row-major.

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return json{{"n", m.rows()}, {"matrix", rows}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
  try {
    const auto& rows = j.at("matrix");
    const std::size_t n = j.contains("n") ? j.at("n").get<std::size_t>() : rows.size();
    if (rows.size() != n) throw DataError("unitary file: row count does not match n");
    ComplexMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      if (rows[r].size() != n) throw DataError("unitary file: column count does not match n");
      for (std::size_t c = 0; c < n; ++c) {
        const auto& cell = rows[r][c];
        if (!cell.is_array() || cell.size() != 2)
          throw DataError("unitary file: each entry must be [re, im]");
        m(r, c) = cdouble(cell[0].get<double>(), cell[1].get<double>());
      }
    }
    if (!m.all_finite()) throw DataError("unitary file: non-finite entry");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("unitary file: ") + e.what());
  }
}

inline ComplexMatrix matrix_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("unitary file: ") + e.what());
  }
  return matrix_from_json(j);
}

// -- reports ----------------------------------------------------------------

inline json verdicts_to_json(const std::vector<Verdict>& vs) {
  json out = json::array();
  for (const auto& v : vs)
    out.push_back({{"name", v.name}, {"value", v.value}, {"threshold", v.threshold},
                   {"pass", v.pass}});
  return out;
}

inline json certification_to_json(const CertificationReport& rep) {
  json j{{"unitarity_deviation", rep.unitarity_deviation},
         {"identity_deviation", rep.identity_deviation},
         {"recovery_fidelity", rep.recovery_fidelity},
         {"survival", rep.survival},
         {"visibility_raw", rep.visibility_raw},
         {"visibility_normalized", rep.visibility_normalized},
         {"offmode_rate", rep.offmode_rate},
         {"trials", rep.trials},
         {"seed", rep.seed},
         {"verdicts", verdicts_to_json(rep.verdicts)},
         {"pass", rep.passed()}};
  if (rep.sharpness)
    j["sharpness"] = {{"gram_offdiag_max", rep.sharpness->gram_offdiag_max},
                      {"threshold", rep.sharpness->threshold},
                      {"pass", rep.sharpness->pass}};
  if (rep.coverage) {
    j["coverage"] = {{"fired", rep.coverage->fired},
                     {"clicks", rep.coverage->clicks},
                     {"min_clicks_required", rep.coverage->min_clicks_required},
                     {"pass", rep.coverage->pass}};
  }
  if (rep.self_adjoint)
    j["self_adjoint"] = {{"deviation", rep.self_adjoint->deviation},
                         {"tolerance", rep.self_adjoint->tolerance},
                         {"pass", rep.self_adjoint->pass}};
  if (!rep.amplification.empty()) {
    json rows = json::array();
    for (const auto& r : rep.amplification)
      rows.push_back({{"arrangement", style_name(r.style)}, {"copies", r.copies},
                      {"identity_deviation", r.identity_deviation}});
    j["amplification"] = rows;
  }
  return j;
}

inline const char* param_which_name(ParamRef::Which w) {
  switch (w) {
    case ParamRef::Which::kTheta: return "theta";
    case ParamRef::Which::kPhi: return "phi";
    case ParamRef::Which::kPhase: return "phase";
  }
  return "?";
}

inline json calibration_to_json(const CalibrationResult& r) {
  json params = json::array();
  for (std::size_t i = 0; i < r.parameters.size(); ++i) {
    json p{{"gate", r.parameters[i].gate},
           {"which", param_which_name(r.parameters[i].which)},
           {"estimate", r.estimates[i]},
           {"unbounded", r.unbounded[i]}};
    if (r.parameters[i].which == ParamRef::Which::kPhase)
      p["phase_index"] = r.parameters[i].phase_index;
    if (r.unbounded[i])
      p["confidence_half_width"] = nullptr;
    else
      p["confidence_half_width"] = r.confidence_half_width[i];
    params.push_back(std::move(p));
  }
  return json{{"parameters", params},
              {"objective_value", r.objective_value},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"probability_floor", r.probability_floor},
              {"curvature_floor", r.curvature_floor}};
}

/// Wraps a report body with provenance: schema version, code version, and
/// the fully resolved run configuration. No timestamps, so identical runs
/// serialize byte-identically.
inline std::string wrap_report(const json& body, const json& resolved_config) {
  json j{{"schema_version", kSchemaVersion},
         {"generator", kVersion},
         {"config", resolved_config},
         {"report", body}};
  return j.dump(2) + "\n";
}

}  // namespace qmesh
