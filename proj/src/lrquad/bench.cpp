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

#include "lrquad/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lrquad/error.hpp"
#include "lrquad/metrics.hpp"
#include "lrquad/parallel.hpp"

namespace lrquad {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct RunConfig {
  Variant variant;
  double alpha;
};

std::vector<RunConfig> expand_configs(const ExperimentSpec& spec) {
  std::vector<RunConfig> out;
  for (const Variant v : spec.variants) {
    if (v == Variant::plain) {
      out.push_back({v, kNaN});
    } else {
      for (const double a : spec.alphas) out.push_back({v, a});
    }
  }
  return out;
}

SolverConfig solver_config(const ExperimentSpec& spec, const RunConfig& rc) {
  SolverConfig cfg;
  cfg.variant = rc.variant;
  // The plain variant ignores alpha; any positive value passes validation.
  cfg.alpha = rc.variant == Variant::plain ? 1.0 : rc.alpha;
  cfg.step.kind = StepRule::Kind::empirical;
  cfg.step.c = spec.step_c;
  cfg.max_iters = spec.max_iters;
  cfg.success_tol = spec.tol;
  return cfg;
}

std::vector<Eigen::Index> resolved_grid(const ExperimentSpec& spec) {
  std::vector<Eigen::Index> out;
  for (const auto& sc : spec.m_grid) out.push_back(sc.resolve(spec.n, spec.r));
  return out;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::phase_transition: return "phase_transition";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::init_quality: return "init_quality";
    case ExperimentKind::theory_check: return "theory_check";
  }
  return "unknown";
}

Eigen::Index SampleCount::resolve(Eigen::Index n, Eigen::Index r) const {
  const double m = per_nr ? value * static_cast<double>(n * r) : value;
  return static_cast<Eigen::Index>(std::llround(m));
}

SampleCount parse_sample_count(const std::string& text) {
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  std::string body = first == std::string::npos ? std::string() : text.substr(first, last - first + 1);
  SampleCount out;
  if (body.size() > 2 && body.compare(body.size() - 2, 2, "nr") == 0) {
    out.per_nr = true;
    body.resize(body.size() - 2);
  }
  std::size_t used = 0;
  try {
    out.value = std::stod(body, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != body.size() || !(out.value > 0) || !std::isfinite(out.value) ||
      (!out.per_nr && out.value != std::floor(out.value)))
    fail(Errc::parse, "cannot parse measurement count '" + text + "' (expected e.g. 400 or 2.5nr)");
  return out;
}

ExperimentSpec default_spec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ExperimentKind::phase_transition:
      for (double k = 1.0; k <= 4.0 + 1e-12; k += 0.5) spec.m_grid.push_back({k, true});
      spec.variants = {Variant::exponential, Variant::plain};
      break;
    case ExperimentKind::convergence:
      spec.m_grid = {{3.0, true}};
      spec.trials = 1;
      spec.alphas = {20.0, 100.0};
      break;
    case ExperimentKind::init_quality:
      spec.n = 100;
      spec.m_grid = {{2.0, true}, {4.0, true}, {8.0, true}};
      spec.trials = 20;
      break;
    case ExperimentKind::theory_check:
      spec.probes = default_probe_suite();
      break;
  }
  return spec;
}

void validate(const ExperimentSpec& spec) {
  require(spec.n >= 2 && spec.r >= 1, Errc::invalid_argument, "spec: need n >= 2 and r >= 1");
  require(spec.r < spec.n, Errc::invalid_argument, "spec: need r < n");
  require(spec.trials >= 1, Errc::invalid_argument, "spec: trials must be >= 1");
  require(spec.sigma >= 0, Errc::invalid_argument, "spec: sigma must be >= 0");
  require(spec.alpha_y > 0, Errc::invalid_argument, "spec: alpha_y must be positive");
  require(spec.step_c > 0, Errc::invalid_argument, "spec: step constant must be positive");
  require(spec.max_iters >= 1, Errc::invalid_argument, "spec: max_iters must be >= 1");
  require(spec.tol > 0, Errc::invalid_argument, "spec: tol must be positive");
  require(spec.threads >= 1, Errc::invalid_argument, "spec: threads must be >= 1");
  if (spec.kind == ExperimentKind::theory_check) {
    for (const auto& p : spec.probes)
      if (std::find(known_probes().begin(), known_probes().end(), p) == known_probes().end())
        fail(Errc::unknown_probe, "unknown probe '" + p + "'");
    return;
  }
  require(!spec.m_grid.empty(), Errc::invalid_argument, "spec: m grid is empty");
  for (const auto& sc : spec.m_grid)
    require(sc.resolve(spec.n, spec.r) >= 1, Errc::invalid_argument, "spec: every m must be >= 1");
  if (spec.kind != ExperimentKind::init_quality) {
    require(!spec.variants.empty(), Errc::invalid_argument, "spec: no variants selected");
    for (const double a : spec.alphas) require(a > 0, Errc::invalid_argument, "spec: alpha must be positive");
    const bool any_exp = std::find(spec.variants.begin(), spec.variants.end(), Variant::exponential) !=
                         spec.variants.end();
    require(!any_exp || !spec.alphas.empty(), Errc::invalid_argument, "spec: no alpha values given");
  }
}

RngStream trial_stream(std::uint64_t seed, std::size_t grid_index, int trial) {
  return RngStream(seed, hash_combine(grid_index, static_cast<std::uint64_t>(trial)));
}

Problem make_problem(Eigen::Index n, Eigen::Index r, Eigen::Index m, double sigma, const RngStream& stream) {
  TargetMatrix target = random_target(n, r, stream.child(0));
  SensingEnsemble ensemble = gaussian_ensemble(m, n, stream.child(1));
  MeasurementSet y = measure(target, ensemble);
  if (sigma > 0) y = add_noise(y, sigma, stream.child(2));
  return Problem{std::move(target), std::move(ensemble), std::move(y)};
}

ExperimentReport run_phase_transition(const ExperimentSpec& spec) {
  validate(spec);
  require(spec.kind == ExperimentKind::phase_transition, Errc::invalid_argument, "spec kind is not phase_transition");
  const auto grid = resolved_grid(spec);
  const auto configs = expand_configs(spec);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t tasks = grid.size() * trials;

  struct Outcome {
    bool success = false;
    double init_error = kNaN;
    double final_error = kInf;
    int iterations = 0;
    std::string termination;
    double seconds = 0.0;
  };
  std::vector<Outcome> outcomes(tasks * configs.size());
  InitConfig init_cfg;
  init_cfg.alpha_y = spec.alpha_y;

  parallel_for(tasks, spec.threads, [&](std::size_t task) {
    const std::size_t g = task / trials;
    const int t = static_cast<int>(task % trials);
    Outcome* slot = &outcomes[task * configs.size()];
    const auto start = std::chrono::steady_clock::now();
    std::optional<Problem> problem;
    std::optional<InitResult> init;
    try {
      problem = make_problem(spec.n, spec.r, grid[g], spec.sigma, trial_stream(spec.seed, g, t));
      init = spectral_init(problem->ensemble, problem->y, spec.r, init_cfg);
    } catch (const Error&) {
      // Degenerate draws (e.g. sum y <= 0 under heavy noise) count as failures.
      for (std::size_t c = 0; c < configs.size(); ++c) slot[c].termination = "init_failed";
      return;
    }
    const double init_error = relative_error(init->u0, problem->target.x());
    const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const auto t0 = std::chrono::steady_clock::now();
      const RunTrace trace =
          run(problem->ensemble, problem->y, init->u0, solver_config(spec, configs[c]), &problem->target);
      Outcome& out = slot[c];
      out.init_error = init_error;
      out.iterations = trace.iterations;
      out.termination = std::string(to_string(trace.termination));
      if (trace.termination == Termination::diverged) {
        out.final_error = kInf;
      } else {
        out.final_error = trace.records.back().relative_error;
        out.success = out.final_error < spec.tol;
      }
      out.seconds = setup / configs.size() +
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  });

  ExperimentReport report;
  report.spec = spec;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CellResult cell;
      cell.variant = configs[c].variant;
      cell.alpha = configs[c].alpha;
      cell.m = grid[g];
      cell.trials = spec.trials;
      std::vector<double> finals;
      double iter_sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const Outcome& o = outcomes[(g * trials + t) * configs.size() + c];
        cell.successes += o.success ? 1 : 0;
        finals.push_back(o.final_error);
        iter_sum += o.iterations;
        cell.wall_time_s += o.seconds;
      }
      cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
      double sum = 0.0;
      for (const double f : finals) sum += f;
      cell.mean_final_rel_error = sum / static_cast<double>(finals.size());
      cell.median_final_rel_error = median_of(finals);
      cell.mean_iterations = iter_sum / static_cast<double>(trials);
      report.cells.push_back(cell);
    }
  }
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t t = 0; t < trials; ++t)
      for (std::size_t c = 0; c < configs.size(); ++c) {
        const Outcome& o = outcomes[(g * trials + t) * configs.size() + c];
        report.trials.push_back(TrialRow{configs[c].variant, configs[c].alpha, grid[g], static_cast<int>(t),
                                         o.success, o.init_error, o.final_error, o.iterations, o.termination});
      }
  return report;
}

ExperimentReport run_convergence(const ExperimentSpec& spec) {
  validate(spec);
  require(spec.kind == ExperimentKind::convergence, Errc::invalid_argument, "spec kind is not convergence");
  const Eigen::Index m = spec.m_grid.front().resolve(spec.n, spec.r);
  const auto configs = expand_configs(spec);
  InitConfig init_cfg;
  init_cfg.alpha_y = spec.alpha_y;

  const std::size_t tasks = static_cast<std::size_t>(spec.trials) * configs.size();
  std::vector<RunTrace> traces(tasks);
  std::vector<double> init_errors(tasks, kNaN);
  parallel_for(tasks, spec.threads, [&](std::size_t task) {
    const int t = static_cast<int>(task / configs.size());
    const std::size_t c = task % configs.size();
    const Problem p = make_problem(spec.n, spec.r, m, spec.sigma, trial_stream(spec.seed, 0, t));
    const Matrix u0 = spec.init_from_truth ? p.target.x() : spectral_init(p.ensemble, p.y, spec.r, init_cfg).u0;
    init_errors[task] = relative_error(u0, p.target.x());
    traces[task] = run(p.ensemble, p.y, u0, solver_config(spec, configs[c]), &p.target);
  });

  ExperimentReport report;
  report.spec = spec;
  for (std::size_t task = 0; task < tasks; ++task) {
    const int t = static_cast<int>(task / configs.size());
    const RunConfig& rc = configs[task % configs.size()];
    const RunTrace& trace = traces[task];
    for (const auto& rec : trace.records) report.rows.push_back(ConvergenceRow{rc.variant, rc.alpha, t, rec});
    const double final_error =
        trace.termination == Termination::diverged ? kInf : trace.records.back().relative_error;
    report.trials.push_back(TrialRow{rc.variant, rc.alpha, m, t, final_error < spec.tol, init_errors[task],
                                     final_error, trace.iterations, std::string(to_string(trace.termination))});
  }
  return report;
}

ExperimentReport run_init_quality(const ExperimentSpec& spec) {
  validate(spec);
  require(spec.kind == ExperimentKind::init_quality, Errc::invalid_argument, "spec kind is not init_quality");
  ExperimentReport report;
  report.spec = spec;
  report.probes.push_back(
      init_quality_probe(spec.n, spec.r, resolved_grid(spec), spec.trials, spec.alpha_y, RngStream(spec.seed, 0)));
  report.all_passed = report.probes.back().passed;
  return report;
}

const std::vector<std::string>& default_probe_suite() {
  static const std::vector<std::string> suite{"concentration", "expectation_identity", "regularity",
                                              "init_quality"};
  return suite;
}

const std::vector<std::string>& known_probes() {
  static const std::vector<std::string> all{"concentration", "concentration_upper", "expectation_identity",
                                            "regularity", "init_quality", "contraction"};
  return all;
}

namespace {

Matrix random_psd(Eigen::Index n, const RngStream& stream) {
  const Matrix b = gaussian_matrix(n, n, stream);
  const Matrix m = b * b.transpose();
  return m.selfadjointView<Eigen::Lower>();
}

Matrix orthogonal_column_target(Eigen::Index n, Eigen::Index r, const RngStream& stream) {
  const Matrix q = random_orthogonal(n, stream.child(0)).leftCols(r);
  Vector scales = gaussian_vector(r, stream.child(1)).cwiseAbs().array() + 0.5;
  return q * scales.asDiagonal();
}

ProbeReport run_probe(const std::string& name, std::uint64_t seed, std::size_t index) {
  const RngStream stream(seed, hash_combine(0x7072'6f62'6500ULL, index));
  if (name == "concentration") return concentration_probe(random_psd(50, stream.child(0)), 0.25, stream.child(1));
  if (name == "concentration_upper") {
    Matrix m = gaussian_matrix(50, 50, stream.child(0));
    m = (m + m.transpose()).eval();
    return concentration_upper_probe(m, 0.25, stream.child(1));
  }
  if (name == "expectation_identity") {
    const Matrix x = orthogonal_column_target(6, 2, stream.child(0));
    const Matrix h = 0.3 * gaussian_matrix(6, 2, stream.child(1));
    return expectation_identity_probe(x, h, 1'000'000, stream.child(2));
  }
  if (name == "regularity") {
    const Eigen::Index n = 60, r = 2, m = 12 * n * r;
    const Problem p = make_problem(n, r, m, 0.0, stream.child(0));
    return regularity_probe(p.ensemble, p.y, p.target, 20.0, 50, stream.child(1), true);
  }
  if (name == "init_quality") return init_quality_probe(100, 2, {400, 800, 1600}, 20, 9.0, stream);
  if (name == "contraction") {
    const Eigen::Index n = 20, r = 2, m = 8 * n * r;
    const Problem p = make_problem(n, r, m, 0.0, stream.child(0));
    const InitResult init = spectral_init(p.ensemble, p.y, r);
    SolverConfig cfg;
    cfg.step.kind = StepRule::Kind::theory;
    cfg.max_iters = 200;
    const RunTrace trace = run(p.ensemble, p.y, init.u0, cfg, &p.target);
    return contraction_probe(trace, p.target, trace.step_size);
  }
  fail(Errc::unknown_probe, "unknown probe '" + name + "'");
}

}  // namespace

ExperimentReport run_theory_check(const ExperimentSpec& spec) {
  validate(spec);
  require(spec.kind == ExperimentKind::theory_check, Errc::invalid_argument, "spec kind is not theory_check");
  const auto& names = spec.probes.empty() ? default_probe_suite() : spec.probes;
  ExperimentReport report;
  report.spec = spec;
  report.spec.probes = names;
  report.probes.resize(names.size());
  parallel_for(names.size(), spec.threads,
               [&](std::size_t i) { report.probes[i] = run_probe(names[i], spec.seed, i); });
  for (const auto& p : report.probes)
    if (p.asserted && !p.passed) report.all_passed = false;
  return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::phase_transition: return run_phase_transition(spec);
    case ExperimentKind::convergence: return run_convergence(spec);
    case ExperimentKind::init_quality: return run_init_quality(spec);
    case ExperimentKind::theory_check: return run_theory_check(spec);
  }
  fail(Errc::invalid_argument, "unknown experiment kind");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string alpha_field(Variant v, double alpha) { return v == Variant::plain ? "" : format_number(alpha); }

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream os;
  const auto& spec = report.spec;
  const double nr = static_cast<double>(spec.n * spec.r);
  switch (spec.kind) {
    case ExperimentKind::phase_transition:
      os << "variant,alpha,m,m_over_nr,trials,successes,success_rate,mean_final_rel_error,"
            "median_final_rel_error,mean_iterations\n";
      for (const auto& c : report.cells)
        os << to_string(c.variant) << ',' << alpha_field(c.variant, c.alpha) << ',' << c.m << ','
           << format_number(static_cast<double>(c.m) / nr) << ',' << c.trials << ',' << c.successes << ','
           << format_number(c.success_rate) << ',' << format_number(c.mean_final_rel_error) << ','
           << format_number(c.median_final_rel_error) << ',' << format_number(c.mean_iterations) << '\n';
      break;
    case ExperimentKind::convergence:
      os << "variant,alpha,trial,iteration,relative_error,objective,weighted_objective,grad_norm\n";
      for (const auto& r : report.rows)
        os << to_string(r.variant) << ',' << alpha_field(r.variant, r.alpha) << ',' << r.trial << ','
           << r.record.iteration << ',' << format_number(r.record.relative_error) << ','
           << format_number(r.record.objective) << ',' << format_number(r.record.weighted_objective) << ','
           << format_number(r.record.grad_norm) << '\n';
      break;
    case ExperimentKind::init_quality: {
      os << "m,m_over_nr,trials,fraction_within,median_d2_over_sigma_r\n";
      const ProbeReport& p = report.probes.front();
      for (const auto& sc : spec.m_grid) {
        const Eigen::Index m = sc.resolve(spec.n, spec.r);
        const std::string key = "m=" + std::to_string(m);
        os << m << ',' << format_number(static_cast<double>(m) / nr) << ',' << spec.trials << ','
           << format_number(p.observed_value(key + ".fraction_within")) << ','
           << format_number(p.observed_value(key + ".median_d2_over_sigma_r")) << '\n';
      }
      break;
    }
    case ExperimentKind::theory_check:
      os << "probe,asserted,passed\n";
      for (const auto& p : report.probes)
        os << p.name << ',' << (p.asserted ? 1 : 0) << ',' << (p.passed ? 1 : 0) << '\n';
      break;
  }
  return os.str();
}

std::string trials_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "variant,alpha,m,trial,success,init_rel_error,final_rel_error,iterations,termination\n";
  for (const auto& t : report.trials)
    os << to_string(t.variant) << ',' << alpha_field(t.variant, t.alpha) << ',' << t.m << ',' << t.trial << ','
       << (t.success ? 1 : 0) << ',' << format_number(t.init_rel_error) << ',' << format_number(t.final_rel_error)
       << ',' << t.iterations << ',' << t.termination << '\n';
  return os.str();
}

namespace {

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json entries_json(const ProbeReport::Entries& entries) {
  json out = json::object();
  for (const auto& [k, v] : entries) out[k] = number_json(v);
  return out;
}

json spec_json(const ExperimentSpec& spec) {
  json out;
  out["kind"] = std::string(to_string(spec.kind));
  out["n"] = spec.n;
  out["r"] = spec.r;
  json grid = json::array();
  for (const auto& sc : spec.m_grid) grid.push_back(sc.resolve(spec.n, spec.r));
  out["m_grid"] = grid;
  out["trials"] = spec.trials;
  out["alphas"] = spec.alphas;
  out["alpha_y"] = spec.alpha_y;
  out["step_c"] = spec.step_c;
  out["sigma"] = spec.sigma;
  out["seed"] = spec.seed;
  json variants = json::array();
  for (const Variant v : spec.variants) variants.push_back(std::string(to_string(v)));
  out["variants"] = variants;
  out["max_iters"] = spec.max_iters;
  out["tol"] = spec.tol;
  if (spec.kind == ExperimentKind::convergence) out["init"] = spec.init_from_truth ? "truth" : "spectral";
  if (spec.kind == ExperimentKind::theory_check) out["probes"] = spec.probes;
  if (spec.kind == ExperimentKind::phase_transition || spec.kind == ExperimentKind::convergence)
    out["notes"] = "target X and ensemble A are resampled for every trial; trial t at grid index g uses "
                   "stream_id hash(g, t); diverged runs count as failures";
  return out;
}

}  // namespace

std::string report_json(const ExperimentReport& report, bool include_timing) {
  json out;
  out["spec"] = spec_json(report.spec);
  if (!report.cells.empty()) {
    json cells = json::array();
    for (const auto& c : report.cells) {
      json cell;
      cell["variant"] = std::string(to_string(c.variant));
      if (c.variant != Variant::plain) cell["alpha"] = c.alpha;
      cell["m"] = c.m;
      cell["trials"] = c.trials;
      cell["successes"] = c.successes;
      cell["success_rate"] = c.success_rate;
      cell["mean_final_rel_error"] = number_json(c.mean_final_rel_error);
      cell["median_final_rel_error"] = number_json(c.median_final_rel_error);
      cell["mean_iterations"] = c.mean_iterations;
      if (include_timing) cell["wall_time_s"] = c.wall_time_s;
      cells.push_back(cell);
    }
    out["cells"] = cells;
  }
  if (!report.probes.empty()) {
    json probes = json::array();
    for (const auto& p : report.probes) {
      json pj;
      pj["name"] = p.name;
      pj["master_seed"] = p.master_seed;
      pj["stream_id"] = p.stream_id;
      pj["parameters"] = entries_json(p.parameters);
      pj["observed"] = entries_json(p.observed);
      pj["bounds"] = entries_json(p.bounds);
      pj["asserted"] = p.asserted;
      pj["passed"] = p.passed;
      if (!p.series.empty()) {
        json series = json::array();
        for (const double v : p.series) series.push_back(number_json(v));
        pj["series"] = series;
      }
      probes.push_back(pj);
    }
    out["probes"] = probes;
    out["all_passed"] = report.all_passed;
  }
  return out.dump(2) + "\n";
}

RecoverResult recover(const SensingEnsemble& ensemble, const MeasurementSet& y, Eigen::Index r,
                      const RecoverOptions& options) {
  if (ensemble.m() != y.m()) {
    std::ostringstream os;
    os << "recover: A has " << ensemble.m() << " rows but y has " << y.m() << " entries";
    fail(Errc::dimension_mismatch, os.str());
  }
  require(options.solver.step.kind != StepRule::Kind::theory, Errc::invalid_argument,
          "recover: the theory step rule needs the unknown target spectrum");
  RecoverResult out;
  out.init = spectral_init(ensemble, y, r, options.init);
  out.trace = run(ensemble, y, out.init.u0, options.solver, nullptr);
  return out;
}

Matrix parse_matrix_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) fail(Errc::parse, origin + ": empty matrix file");
  long long rows = 0, cols = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> rows >> cols) || (header >> extra) || rows < 1 || cols < 1)
      fail(Errc::parse, origin + ": first line must be 'rows cols' with positive counts");
  }
  Matrix out(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!next_line()) {
      std::ostringstream os;
      os << origin << ": expected " << rows << " data rows, found " << i;
      fail(Errc::parse, os.str());
    }
    std::istringstream row(line);
    std::string token;
    long long j = 0;
    while (row >> token) {
      if (j >= cols) {
        std::ostringstream os;
        os << origin << ": line " << line_no << " has more than " << cols << " values";
        fail(Errc::parse, os.str());
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        std::ostringstream os;
        os << origin << ": line " << line_no << ": invalid number '" << token << "'";
        fail(Errc::parse, os.str());
      }
      out(i, j++) = v;
    }
    if (j != cols) {
      std::ostringstream os;
      os << origin << ": line " << line_no << " has " << j << " values, expected " << cols;
      fail(Errc::parse, os.str());
    }
  }
  if (next_line()) fail(Errc::parse, origin + ": trailing data after the last row");
  return out;
}

Matrix read_matrix_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_text(buf.str(), path);
}

std::string format_matrix_text(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << format_number(m(i, j));
    os << '\n';
  }
  return os.str();
}

void write_matrix_text(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
  out << format_matrix_text(m);
  if (!out) fail(Errc::io, "failed writing '" + path + "'");
}

}  // namespace lrquad
