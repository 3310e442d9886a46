// Copyright 2026 The lrquad Authors.
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

#include <optional>
#include <string>
#include <vector>

#include "lrquad/initializer.hpp"
#include "lrquad/solver.hpp"
#include "lrquad/theory.hpp"

namespace lrquad {

enum class ExperimentKind { phase_transition, convergence, init_quality, theory_check };

std::string_view to_string(ExperimentKind kind) noexcept;

/// A measurement count given either absolutely or as a multiple of n r.
struct SampleCount {
  double value = 0.0;
  bool per_nr = false;
  Eigen::Index resolve(Eigen::Index n, Eigen::Index r) const;
};

/// Parses "400" or "2.5nr".
SampleCount parse_sample_count(const std::string& text);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::phase_transition;
  Eigen::Index n = 200;
  Eigen::Index r = 2;
  std::vector<SampleCount> m_grid;
  int trials = 100;
  std::vector<double> alphas{20.0};
  double alpha_y = 9.0;
  double step_c = 0.1;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::vector<Variant> variants{Variant::exponential};
  int max_iters = 3000;
  double tol = 1e-5;
  unsigned threads = 1;
  bool init_from_truth = false;  // convergence only: start at U0 = X
  std::vector<std::string> probes;  // theory_check only
};

/// Defaults for each kind.
ExperimentSpec default_spec(ExperimentKind kind);

void validate(const ExperimentSpec& spec);

struct CellResult {
  Variant variant = Variant::exponential;
  double alpha = 0.0;  // NaN for the plain variant
  Eigen::Index m = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_final_rel_error = 0.0;
  double median_final_rel_error = 0.0;
  double mean_iterations = 0.0;
  double wall_time_s = 0.0;
};

struct TrialRow {
  Variant variant = Variant::exponential;
  double alpha = 0.0;
  Eigen::Index m = 0;
  int trial = 0;
  bool success = false;
  double init_rel_error = 0.0;
  double final_rel_error = 0.0;
  int iterations = 0;
  std::string termination;
};

struct ConvergenceRow {
  Variant variant = Variant::exponential;
  double alpha = 0.0;
  int trial = 0;
  TraceRecord record;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<CellResult> cells;
  std::vector<TrialRow> trials;  // ordered by (grid index, trial, config)
  std::vector<ConvergenceRow> rows;
  std::vector<ProbeReport> probes;
  bool all_passed = true;
};

/// Trial t at grid index g draws everything from RngStream(seed, hash(g, t)).
RngStream trial_stream(std::uint64_t seed, std::size_t grid_index, int trial);

struct Problem {
  TargetMatrix target;
  SensingEnsemble ensemble;
  MeasurementSet y;
};

Problem make_problem(Eigen::Index n, Eigen::Index r, Eigen::Index m, double sigma, const RngStream& stream);

ExperimentReport run_phase_transition(const ExperimentSpec& spec);
ExperimentReport run_convergence(const ExperimentSpec& spec);
ExperimentReport run_init_quality(const ExperimentSpec& spec);

/// Known probe names, in default order.
const std::vector<std::string>& default_probe_suite();
const std::vector<std::string>& known_probes();
ExperimentReport run_theory_check(const ExperimentSpec& spec);

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Primary tabular output of a report; the schema depends on the kind.
std::string report_csv(const ExperimentReport& report);
std::string trials_csv(const ExperimentReport& report);
/// Spec echo, per-cell results and probe reports. Timing is left out unless requested
/// so that the document stays reproducible.
std::string report_json(const ExperimentReport& report, bool include_timing = false);

struct RecoverOptions {
  InitConfig init;
  SolverConfig solver;
};

struct RecoverResult {
  InitResult init;
  RunTrace trace;
};

/// Blind recovery: spectral initialization followed by the solver without a target.
RecoverResult recover(const SensingEnsemble& ensemble, const MeasurementSet& y, Eigen::Index r,
                      const RecoverOptions& options);

/// Plain text: "rows cols" on the first line, then one whitespace-separated row per line.
Matrix read_matrix_text(const std::string& path);
void write_matrix_text(const Matrix& m, const std::string& path);
Matrix parse_matrix_text(const std::string& text, const std::string& origin);
std::string format_matrix_text(const Matrix& m);

/// Shortest round-trip decimal form of a double (17 significant digits at most).
std::string format_number(double v);

}  // namespace lrquad
