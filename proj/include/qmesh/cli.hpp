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

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmesh/clements.hpp"
#include "qmesh/config.hpp"
#include "qmesh/io.hpp"

namespace qmesh::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline CircuitPlan load_nominal(const RunConfig& rc) {
  switch (rc.source) {
    case CircuitSource::kSxReference: {
      const SxReference ref = sx_reference();
      return rc.sx_form == SxForm::kOutputPhases ? ref.plan_output_phases
                                                 : ref.plan_inner_phases;
    }
    case CircuitSource::kPlanFile:
      return plan_from_string(read_file(rc.circuit_path));
    case CircuitSource::kUnitaryFile:
      return clements_decompose(matrix_from_string(read_file(rc.circuit_path)));
  }
  throw ConfigError("config.circuit: unreachable source");
}

inline std::uint64_t require_seed(const RunConfig& rc) {
  if (!rc.seed) throw ConfigError("config: seed is mandatory for stochastic commands");
  return *rc.seed;
}

inline RealizedCircuit base_realization(const CircuitPlan& nominal, const ErrorModel& model) {
  RealizedCircuit rc;
  rc.plan = nominal;
  rc.survival = model.transmission;
  rc.detector_efficiency = broadcast_efficiency(model.detector_efficiency, nominal.modes);
  rc.herald_efficiency = model.herald_efficiency;
  return rc;
}

inline std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

inline int cmd_decompose(const std::string& in_path, const std::string& out_dir) {
  const ComplexMatrix u = matrix_from_string(read_file(in_path));
  const CircuitPlan plan = clements_decompose(u);
  const double round_trip = frobenius_distance(reconstruct(plan), u);
  const std::string out = detail::out_path(out_dir, "plan.json");
  write_file(out, plan_to_string(plan));
  std::printf("decompose: %zu beam splitters + 1 phase layer, round-trip error %.3e\n",
              plan.beam_splitter_count(), round_trip);
  std::printf("decompose: wrote %s\n", out.c_str());
  return kExitPass;
}

inline int cmd_certify(RunConfig rc, const std::string& out_dir) {
  const std::uint64_t seed = detail::require_seed(rc);
  const CircuitPlan nominal = detail::load_nominal(rc);
  const StateVector input = rc.input.state(nominal.modes);

  const RealizedCircuit fwd = perturb(nominal, rc.model, seed);
  const RealizedCircuit mirror =
      rc.mirror == MirrorMode::kAnticorrelated
          ? mirror_circuit(fwd)
          : perturb(invert_plan(nominal), rc.model, derive_seed(seed, 1));

  CertificationReport rep =
      inversion_test(fwd, mirror, input, rc.trials, derive_seed(seed, 2), rc.thresholds);
  rep.sharpness = sharpness_test(fwd, rc.thresholds);
  rep.coverage =
      detector_coverage_test(fwd, input, rc.trials, derive_seed(seed, 3), rc.thresholds);
  rep.self_adjoint = self_adjoint_test(fwd, rc.thresholds.self_adjoint_deviation);
  if (!rc.arrangements.empty())
    rep.amplification = amplification_scan(nominal, rc.model, rc.arrangements, seed);

  write_file(detail::out_path(out_dir, "report.json"),
             wrap_report(certification_to_json(rep), rc.resolved));

  for (const auto& v : rep.verdicts)
    std::printf("certify: %-20s %.6e (threshold %.3e) %s\n", v.name.c_str(), v.value, v.threshold,
                v.pass ? "PASS" : "FAIL");
  std::printf("certify: %-20s %.6e (threshold %.3e) %s\n", "sharpness",
              rep.sharpness->gram_offdiag_max, rep.sharpness->threshold,
              rep.sharpness->pass ? "PASS" : "FAIL");
  std::printf("certify: %-20s min clicks %llu %s\n", "coverage",
              static_cast<unsigned long long>(rep.coverage->min_clicks_required),
              rep.coverage->pass ? "PASS" : "FAIL");
  std::printf("certify: %-20s %.6e (tolerance %.3e) %s\n", "self_adjoint",
              rep.self_adjoint->deviation, rep.self_adjoint->tolerance,
              rep.self_adjoint->pass ? "PASS" : "FAIL");
  std::printf("certify: %s\n", rep.passed() ? "PASS" : "FAIL");
  return rep.passed() ? kExitPass : kExitFail;
}

inline int cmd_generate(RunConfig rc, const std::string& out_dir) {
  const std::uint64_t seed = detail::require_seed(rc);
  const CircuitPlan nominal = detail::load_nominal(rc);
  const StateVector input = rc.input.state(nominal.modes);
  const RealizedCircuit realized = perturb(nominal, rc.model, seed);

  json stats;
  bool all_pass = true;

  if (rc.trials == 0) {
    write_file(detail::out_path(out_dir, "digits.txt"), std::string("\n"));
    stats["status"] = "insufficient data";
    stats["tests"] = json::array();
    write_file(detail::out_path(out_dir, "stats.json"), wrap_report(stats, rc.resolved));
    std::printf("generate: 0 trials, tests skipped (insufficient data)\n");
    return kExitPass;
  }

  const auto outcomes = sample_outcomes(realized, input, rc.trials, derive_seed(seed, 10));
  const DigitSequence digits = digits_from_trials(outcomes, rc.generate.mapping);
  write_file(detail::out_path(out_dir, "digits.txt"), digits_to_text(digits));
  write_file(detail::out_path(out_dir, "digits.bin"), digits_to_packed(digits));

  // Expected digit distribution: explicit config, otherwise what the nominal
  // design predicts conditional on a click (the certification target).
  std::vector<double> expected = rc.generate.expected;
  if (expected.empty()) {
    const OutcomeProbs p = outcome_probs(detail::base_realization(nominal, rc.model), input);
    double sum = 0.0;
    for (double v : p.per_mode) sum += v;
    expected.assign(3, 0.0);
    for (std::size_t k = 0; k < p.per_mode.size(); ++k) {
      const int digit = rc.generate.mapping.empty() ? static_cast<int>(k)
                                                    : rc.generate.mapping[k];
      expected.at(digit) += p.per_mode[k] / sum;
    }
  }

  stats["digits"] = digits.size();
  if (digits.size() == 0) {
    stats["status"] = "insufficient data";
    write_file(detail::out_path(out_dir, "stats.json"), wrap_report(stats, rc.resolved));
    std::printf("generate: no detected trials, tests skipped (insufficient data)\n");
    return kExitPass;
  }

  const ChiSquareResult chi =
      chi_square_frequency(digits, expected, rc.thresholds.significance);
  stats["chi_square"] = {{"stream", "ternary"},           {"statistic", chi.statistic},
                         {"dof", chi.dof},                {"p_value", chi.p_value},
                         {"significance", chi.significance}, {"expected", expected},
                         {"pass", chi.pass}};
  all_pass = all_pass && chi.pass;
  std::printf("generate: chi_square stat=%.4f p=%.4g %s\n", chi.statistic, chi.p_value,
              chi.pass ? "PASS" : "FAIL");

  DigitSequence bits = to_bits(digits, rc.generate.bit_scheme);
  write_file(detail::out_path(out_dir, "bits.txt"), digits_to_text(bits));
  std::string borel_stream = "bits";
  if (rc.generate.von_neumann) {
    bits = von_neumann_extract(bits);
    write_file(detail::out_path(out_dir, "bits_vn.txt"), digits_to_text(bits));
    borel_stream = "bits_vn";
  }

  const std::size_t m = rc.generate.borel_max_block;
  const double need = std::pow(2.0, 2.0 * static_cast<double>(m));
  if (static_cast<double>(bits.size()) >= need) {
    const BorelResult borel = borel_normality(bits, m);
    stats["borel"] = {{"stream", borel_stream},
                      {"max_block", m},
                      {"bound", borel.bound},
                      {"bound_formula", borel.bound_formula},
                      {"pass", borel.pass}};
    all_pass = all_pass && borel.pass;
    std::printf("generate: borel(m<=%zu) on %s bound=%.4g %s\n", m, borel_stream.c_str(),
                borel.bound, borel.pass ? "PASS" : "FAIL");
  } else {
    stats["borel"] = {{"stream", borel_stream}, {"status", "insufficient data"}};
    std::printf("generate: borel skipped (insufficient data)\n");
  }

  write_file(detail::out_path(out_dir, "stats.json"), wrap_report(stats, rc.resolved));
  std::printf("generate: %zu digits, %s\n", digits.size(), all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitPass : kExitFail;
}

inline int cmd_calibrate(RunConfig rc, const std::string& out_dir) {
  const std::uint64_t seed = detail::require_seed(rc);
  if (!rc.calibration) throw ConfigError("config: calibrate needs a calibration section");
  const CircuitPlan nominal = detail::load_nominal(rc);

  CalibrationProblem problem;
  problem.nominal = nominal;
  problem.free_parameters = rc.calibration->free_parameters;
  problem.bounds = rc.calibration->bounds;
  problem.base_model.transmission = rc.model.transmission;
  problem.base_model.detector_efficiency = rc.model.detector_efficiency;
  problem.base_model.herald_efficiency = rc.model.herald_efficiency;

  for (std::size_t i = 0; i < rc.calibration->datasets.size(); ++i) {
    const DatasetConfig& dc = rc.calibration->datasets[i];
    CalibrationDataset ds;
    ds.input = dc.input.state(nominal.modes);
    ds.arrangement = dc.arrangement;
    if (dc.simulate) {
      const RealizedCircuit truth = perturb(nominal, dc.true_model, derive_seed(seed, 100 + i));
      RealizedCircuit device = truth;
      if (dc.arrangement) {
        const std::vector<RealizedCircuit> copies(dc.arrangement->copies, truth);
        device = compose_arrangement(copies, *dc.arrangement);
      }
      ds.counts = sample_trials(device, ds.input, dc.trials, derive_seed(seed, 200 + i));
    } else {
      ds.counts = counts_from_csv(read_file(dc.counts_file));
    }
    problem.datasets.push_back(std::move(ds));
  }

  const CalibrationResult result =
      fit_systematic(problem, derive_seed(seed, 300), rc.calibration->starts);
  write_file(detail::out_path(out_dir, "calibration.json"),
             wrap_report(calibration_to_json(result), rc.resolved));

  for (std::size_t i = 0; i < result.estimates.size(); ++i) {
    if (result.unbounded[i])
      std::printf("calibrate: gate %zu %s = %+.6f rad (unidentifiable from these data)\n",
                  result.parameters[i].gate, param_which_name(result.parameters[i].which),
                  result.estimates[i]);
    else
      std::printf("calibrate: gate %zu %s = %+.6f rad (+-%.6f)\n", result.parameters[i].gate,
                  param_which_name(result.parameters[i].which), result.estimates[i],
                  result.confidence_half_width[i]);
  }
  if (!result.converged) {
    std::printf("calibrate: FAIL (optimizer did not converge; objective %.6f after %zu iterations)\n",
                result.objective_value, result.iterations);
    return kExitFail;
  }
  if (rc.calibration->emit_corrected_plan)
    write_file(detail::out_path(out_dir, "corrected_plan.json"),
               plan_to_string(corrected_plan(nominal, result)));
  std::printf("calibrate: PASS (objective %.6f, %zu iterations)\n", result.objective_value,
              result.iterations);
  return kExitPass;
}

inline int cmd_amplify(RunConfig rc, const std::string& out_dir) {
  const std::uint64_t seed = detail::require_seed(rc);
  if (rc.arrangements.empty()) throw ConfigError("config: amplify needs an arrangements list");
  const CircuitPlan nominal = detail::load_nominal(rc);

  std::vector<AmplificationRow> mean_rows;
  for (std::size_t r = 0; r < rc.scan_repeats; ++r) {
    const auto rows =
        amplification_scan(nominal, rc.model, rc.arrangements, derive_seed(seed, r));
    if (mean_rows.empty()) mean_rows = rows;
    else
      for (std::size_t k = 0; k < rows.size(); ++k)
        mean_rows[k].identity_deviation += rows[k].identity_deviation;
  }
  for (auto& row : mean_rows)
    row.identity_deviation /= static_cast<double>(rc.scan_repeats);

  write_file(detail::out_path(out_dir, "scan.csv"), amplification_to_csv(mean_rows));
  for (const auto& row : mean_rows)
    std::printf("amplify: %-18s copies=%zu identity_deviation=%.6e\n", style_name(row.style),
                row.copies, row.identity_deviation);
  return kExitPass;
}

/// Entry point shared by the binary and the test harness. Returns the
/// process exit code: 0 pass, 1 certified fail, 2 usage or config error.
inline int run(std::vector<std::string> args) {
  CLI::App app{"mesh interferometer simulator and certification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", decompose_in;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")->required();
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* dec = app.add_subcommand("decompose", "factor a unitary into a mesh plan");
  dec->add_option("input", decompose_in, "unitary matrix file")->required();
  dec->add_option("--out", out_dir, "output directory");

  add_common(app.add_subcommand("certify", "run the inversion certification battery"));
  add_common(app.add_subcommand("generate", "sample trials and emit digit streams"));
  add_common(app.add_subcommand("calibrate", "fit systematic errors from counts"));
  add_common(app.add_subcommand("amplify", "scan error-amplifying arrangements"));

  // CLI11 wants argv in reverse order for its vector overload.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return kExitPass;
    }
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("decompose")) return cmd_decompose(decompose_in, out_dir);

    RunConfig rc = parse_config_text(read_file(config_path));
    if (seed_override) {
      rc.seed = *seed_override;
      rc.resolved["seed"] = *seed_override;
    }
    if (app.got_subcommand("certify")) return cmd_certify(std::move(rc), out_dir);
    if (app.got_subcommand("generate")) return cmd_generate(std::move(rc), out_dir);
    if (app.got_subcommand("calibrate")) return cmd_calibrate(std::move(rc), out_dir);
    if (app.got_subcommand("amplify")) return cmd_amplify(std::move(rc), out_dir);
    return kExitUsage;
  } catch (const NonUnitaryError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}

inline int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace qmesh::cli
