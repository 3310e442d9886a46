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

#include "lrquad/lrquad.h"

#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "lrquad/bench.hpp"
#include "lrquad/error.hpp"
#include "lrquad/metrics.hpp"

struct lrq_matrix {
  lrquad::Matrix value;
};

struct lrq_run {
  lrquad::RecoverResult result;
};

struct lrq_experiment_spec {
  lrquad::ExperimentSpec value;
};

struct lrq_report {
  lrquad::ExperimentReport value;
  std::string csv;
  std::string trials_csv;
  std::string json;
  std::string json_timed;
};

namespace {

thread_local std::string last_error;

lrq_status to_status(lrquad::Errc code) {
  using lrquad::Errc;
  switch (code) {
    case Errc::invalid_argument: return LRQ_ERR_INVALID_ARGUMENT;
    case Errc::dimension_mismatch: return LRQ_ERR_DIMENSION_MISMATCH;
    case Errc::degenerate_measurements: return LRQ_ERR_DEGENERATE_MEASUREMENTS;
    case Errc::not_symmetric: return LRQ_ERR_NOT_SYMMETRIC;
    case Errc::not_converged: return LRQ_ERR_NOT_CONVERGED;
    case Errc::non_finite: return LRQ_ERR_NON_FINITE;
    case Errc::io: return LRQ_ERR_IO;
    case Errc::parse: return LRQ_ERR_PARSE;
    case Errc::unknown_probe: return LRQ_ERR_UNKNOWN_PROBE;
  }
  return LRQ_ERR_INTERNAL;
}

lrq_status set_error(lrq_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body and converts any exception into a status code plus message.
template <class Fn>
lrq_status guarded(Fn&& body) {
  try {
    body();
    last_error.clear();
    return LRQ_OK;
  } catch (const lrquad::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(LRQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(LRQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(LRQ_ERR_INTERNAL, "unknown error");
  }
}

#define LRQ_REQUIRE_ARG(cond, msg) \
  do {                             \
    if (!(cond)) return set_error(LRQ_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

lrquad::MeasurementSet as_measurements(const lrquad::Matrix& y) {
  lrquad::require(y.rows() == 1 || y.cols() == 1, lrquad::Errc::dimension_mismatch,
                  "measurements must be a single row or column");
  lrquad::MeasurementSet out;
  out.y = y.reshaped();
  // Negative entries can only come from noise.
  out.noiseless = (out.y.array() >= 0).all();
  return out;
}

std::vector<std::string> split_list(const char* text) {
  std::vector<std::string> out;
  if (text == nullptr) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

extern "C" {

const char* lrq_version(void) { return "1.0.0"; }

const char* lrq_status_string(lrq_status status) {
  switch (status) {
    case LRQ_OK: return "ok";
    case LRQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LRQ_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case LRQ_ERR_DEGENERATE_MEASUREMENTS: return "degenerate measurements";
    case LRQ_ERR_NOT_SYMMETRIC: return "matrix not symmetric";
    case LRQ_ERR_NOT_CONVERGED: return "not converged";
    case LRQ_ERR_NON_FINITE: return "non-finite value";
    case LRQ_ERR_IO: return "i/o error";
    case LRQ_ERR_PARSE: return "parse error";
    case LRQ_ERR_UNKNOWN_PROBE: return "unknown probe";
    case LRQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lrq_last_error(void) { return last_error.c_str(); }

lrq_status lrq_matrix_create(size_t rows, size_t cols, const double* data, lrq_matrix** out) {
  LRQ_REQUIRE_ARG(out != nullptr, "lrq_matrix_create: out is NULL");
  LRQ_REQUIRE_ARG(rows >= 1 && cols >= 1, "lrq_matrix_create: rows and cols must be >= 1");
  return guarded([&] {
    auto m = std::make_unique<lrq_matrix>();
    m->value = lrquad::Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (data != nullptr)
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) m->value(i, j) = data[i * cols + j];
    *out = m.release();
  });
}

void lrq_matrix_destroy(lrq_matrix* m) { delete m; }

size_t lrq_matrix_rows(const lrq_matrix* m) { return m ? static_cast<size_t>(m->value.rows()) : 0; }

size_t lrq_matrix_cols(const lrq_matrix* m) { return m ? static_cast<size_t>(m->value.cols()) : 0; }

double lrq_matrix_get(const lrq_matrix* m, size_t row, size_t col) {
  if (m == nullptr || row >= lrq_matrix_rows(m) || col >= lrq_matrix_cols(m)) return std::nan("");
  return m->value(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

lrq_status lrq_matrix_copy_to(const lrq_matrix* m, double* data, size_t len) {
  LRQ_REQUIRE_ARG(m != nullptr && data != nullptr, "lrq_matrix_copy_to: NULL argument");
  const size_t rows = lrq_matrix_rows(m), cols = lrq_matrix_cols(m);
  LRQ_REQUIRE_ARG(len >= rows * cols, "lrq_matrix_copy_to: buffer too small");
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) data[i * cols + j] = m->value(i, j);
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_matrix_read_text(const char* path, lrq_matrix** out) {
  LRQ_REQUIRE_ARG(path != nullptr && out != nullptr, "lrq_matrix_read_text: NULL argument");
  return guarded([&] {
    auto m = std::make_unique<lrq_matrix>();
    m->value = lrquad::read_matrix_text(path);
    *out = m.release();
  });
}

lrq_status lrq_matrix_write_text(const lrq_matrix* m, const char* path) {
  LRQ_REQUIRE_ARG(m != nullptr && path != nullptr, "lrq_matrix_write_text: NULL argument");
  return guarded([&] { lrquad::write_matrix_text(m->value, path); });
}

lrq_status lrq_relative_error(const lrq_matrix* u, const lrq_matrix* x, double* out) {
  LRQ_REQUIRE_ARG(u != nullptr && x != nullptr && out != nullptr, "lrq_relative_error: NULL argument");
  return guarded([&] { *out = lrquad::relative_error(u->value, x->value); });
}

lrq_status lrq_generate(size_t n, size_t r, size_t m, double sigma, uint64_t seed, lrq_matrix** x, lrq_matrix** a,
                        lrq_matrix** y) {
  LRQ_REQUIRE_ARG(m >= 1, "lrq_generate: m must be >= 1");
  LRQ_REQUIRE_ARG(sigma >= 0, "lrq_generate: sigma must be >= 0");
  return guarded([&] {
    const lrquad::Problem p = lrquad::make_problem(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r),
                                                   static_cast<Eigen::Index>(m), sigma,
                                                   lrquad::trial_stream(seed, 0, 0));
    auto xm = std::make_unique<lrq_matrix>(lrq_matrix{p.target.x()});
    auto am = std::make_unique<lrq_matrix>(lrq_matrix{p.ensemble.a});
    auto ym = std::make_unique<lrq_matrix>(lrq_matrix{lrquad::Matrix(p.y.y)});
    if (x) *x = xm.release();
    if (a) *a = am.release();
    if (y) *y = ym.release();
  });
}

void lrq_recover_options_init(lrq_recover_options* options) {
  if (options == nullptr) return;
  options->alpha = 20.0;
  options->alpha_y = 9.0;
  options->variant = LRQ_VARIANT_EXPONENTIAL;
  options->step_rule = LRQ_STEP_EMPIRICAL;
  options->step_c = 0.1;
  options->step_mu = 0.0;
  options->max_iters = 3000;
  options->grad_tol = 0.0;
}

lrq_status lrq_recover(const lrq_matrix* a, const lrq_matrix* y, size_t r, const lrq_recover_options* options,
                       lrq_run** out) {
  LRQ_REQUIRE_ARG(a != nullptr && y != nullptr && out != nullptr, "lrq_recover: NULL argument");
  lrq_recover_options opts;
  lrq_recover_options_init(&opts);
  if (options != nullptr) opts = *options;
  return guarded([&] {
    lrquad::RecoverOptions ro;
    ro.init.alpha_y = opts.alpha_y;
    ro.solver.alpha = opts.alpha;
    ro.solver.variant = opts.variant == LRQ_VARIANT_PLAIN ? lrquad::Variant::plain : lrquad::Variant::exponential;
    if (opts.step_rule == LRQ_STEP_FIXED) {
      ro.solver.step.kind = lrquad::StepRule::Kind::fixed;
      ro.solver.step.mu = opts.step_mu;
    } else {
      ro.solver.step.kind = lrquad::StepRule::Kind::empirical;
      ro.solver.step.c = opts.step_c;
    }
    ro.solver.max_iters = opts.max_iters;
    if (opts.grad_tol > 0) ro.solver.grad_tol = opts.grad_tol;
    const lrquad::MeasurementSet ys = as_measurements(y->value);
    auto run = std::make_unique<lrq_run>();
    run->result = lrquad::recover(lrquad::SensingEnsemble{a->value}, ys, static_cast<Eigen::Index>(r), ro);
    *out = run.release();
  });
}

void lrq_run_destroy(lrq_run* run) { delete run; }

lrq_status lrq_run_solution(const lrq_run* run, lrq_matrix** out) {
  LRQ_REQUIRE_ARG(run != nullptr && out != nullptr, "lrq_run_solution: NULL argument");
  return guarded([&] { *out = new lrq_matrix{run->result.trace.u}; });
}

lrq_status lrq_run_initial(const lrq_run* run, lrq_matrix** out) {
  LRQ_REQUIRE_ARG(run != nullptr && out != nullptr, "lrq_run_initial: NULL argument");
  return guarded([&] { *out = new lrq_matrix{run->result.init.u0}; });
}

int lrq_run_iterations(const lrq_run* run) { return run ? run->result.trace.iterations : -1; }

int lrq_run_converged(const lrq_run* run) { return run && run->result.trace.converged ? 1 : 0; }

lrq_termination lrq_run_termination(const lrq_run* run) {
  if (run == nullptr) return LRQ_TERM_DIVERGED;
  switch (run->result.trace.termination) {
    case lrquad::Termination::reached_tolerance: return LRQ_TERM_REACHED_TOLERANCE;
    case lrquad::Termination::stationary: return LRQ_TERM_STATIONARY;
    case lrquad::Termination::max_iters: return LRQ_TERM_MAX_ITERS;
    case lrquad::Termination::diverged: return LRQ_TERM_DIVERGED;
  }
  return LRQ_TERM_DIVERGED;
}

double lrq_run_step_size(const lrq_run* run) { return run ? run->result.trace.step_size : std::nan(""); }

size_t lrq_run_kept_count(const lrq_run* run) {
  return run ? static_cast<size_t>(run->result.init.kept_count) : 0;
}

size_t lrq_run_trace_length(const lrq_run* run) { return run ? run->result.trace.records.size() : 0; }

lrq_status lrq_run_trace_record(const lrq_run* run, size_t index, lrq_trace_record* out) {
  LRQ_REQUIRE_ARG(run != nullptr && out != nullptr, "lrq_run_trace_record: NULL argument");
  LRQ_REQUIRE_ARG(index < run->result.trace.records.size(), "lrq_run_trace_record: index out of range");
  const auto& rec = run->result.trace.records[index];
  *out = lrq_trace_record{rec.iteration, rec.objective, rec.weighted_objective, rec.grad_norm, rec.relative_error};
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_spec_create(lrq_experiment_kind kind, lrq_experiment_spec** out) {
  LRQ_REQUIRE_ARG(out != nullptr, "lrq_spec_create: out is NULL");
  LRQ_REQUIRE_ARG(kind >= LRQ_EXPERIMENT_PHASE_TRANSITION && kind <= LRQ_EXPERIMENT_THEORY_CHECK,
                  "lrq_spec_create: unknown experiment kind");
  return guarded([&] {
    auto spec = std::make_unique<lrq_experiment_spec>();
    spec->value = lrquad::default_spec(static_cast<lrquad::ExperimentKind>(kind));
    *out = spec.release();
  });
}

void lrq_spec_destroy(lrq_experiment_spec* spec) { delete spec; }

#define LRQ_SPEC_SETTER(name, type, field, cond, msg)                         \
  lrq_status name(lrq_experiment_spec* spec, type value) {                    \
    LRQ_REQUIRE_ARG(spec != nullptr, #name ": spec is NULL");                 \
    LRQ_REQUIRE_ARG(cond, #name ": " msg);                                    \
    spec->value.field = value;                                                \
    last_error.clear();                                                       \
    return LRQ_OK;                                                            \
  }

LRQ_SPEC_SETTER(lrq_spec_set_trials, int, trials, value >= 1, "trials must be >= 1")
LRQ_SPEC_SETTER(lrq_spec_set_alpha_y, double, alpha_y, value > 0, "alpha_y must be positive")
LRQ_SPEC_SETTER(lrq_spec_set_step_c, double, step_c, value > 0, "step constant must be positive")
LRQ_SPEC_SETTER(lrq_spec_set_sigma, double, sigma, value >= 0, "sigma must be >= 0")
LRQ_SPEC_SETTER(lrq_spec_set_seed, uint64_t, seed, true, "")
LRQ_SPEC_SETTER(lrq_spec_set_max_iters, int, max_iters, value >= 1, "max_iters must be >= 1")
LRQ_SPEC_SETTER(lrq_spec_set_tol, double, tol, value > 0, "tol must be positive")
LRQ_SPEC_SETTER(lrq_spec_set_threads, unsigned, threads, value >= 1, "threads must be >= 1")

#undef LRQ_SPEC_SETTER

lrq_status lrq_spec_set_size(lrq_experiment_spec* spec, size_t n, size_t r) {
  LRQ_REQUIRE_ARG(spec != nullptr, "lrq_spec_set_size: spec is NULL");
  LRQ_REQUIRE_ARG(r >= 1 && r < n, "lrq_spec_set_size: need 1 <= r < n");
  spec->value.n = static_cast<Eigen::Index>(n);
  spec->value.r = static_cast<Eigen::Index>(r);
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_spec_set_m_grid(lrq_experiment_spec* spec, const char* grid) {
  LRQ_REQUIRE_ARG(spec != nullptr && grid != nullptr, "lrq_spec_set_m_grid: NULL argument");
  return guarded([&] {
    std::vector<lrquad::SampleCount> parsed;
    for (const auto& item : split_list(grid)) parsed.push_back(lrquad::parse_sample_count(item));
    lrquad::require(!parsed.empty(), lrquad::Errc::parse, "m grid is empty");
    spec->value.m_grid = std::move(parsed);
  });
}

lrq_status lrq_spec_set_alphas(lrq_experiment_spec* spec, const double* alphas, size_t count) {
  LRQ_REQUIRE_ARG(spec != nullptr && alphas != nullptr && count >= 1, "lrq_spec_set_alphas: need >= 1 value");
  for (size_t i = 0; i < count; ++i) LRQ_REQUIRE_ARG(alphas[i] > 0, "lrq_spec_set_alphas: alpha must be positive");
  spec->value.alphas.assign(alphas, alphas + count);
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_spec_set_variants(lrq_experiment_spec* spec, int variants) {
  LRQ_REQUIRE_ARG(spec != nullptr, "lrq_spec_set_variants: spec is NULL");
  LRQ_REQUIRE_ARG(variants >= 1 && variants <= LRQ_VARIANTS_BOTH, "lrq_spec_set_variants: invalid mask");
  spec->value.variants.clear();
  if (variants & LRQ_VARIANTS_EXPONENTIAL) spec->value.variants.push_back(lrquad::Variant::exponential);
  if (variants & LRQ_VARIANTS_PLAIN) spec->value.variants.push_back(lrquad::Variant::plain);
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_spec_set_init_from_truth(lrq_experiment_spec* spec, int enabled) {
  LRQ_REQUIRE_ARG(spec != nullptr, "lrq_spec_set_init_from_truth: spec is NULL");
  spec->value.init_from_truth = enabled != 0;
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_spec_set_probes(lrq_experiment_spec* spec, const char* probes) {
  LRQ_REQUIRE_ARG(spec != nullptr, "lrq_spec_set_probes: spec is NULL");
  return guarded([&] {
    auto names = split_list(probes);
    if (names.empty()) names = lrquad::default_probe_suite();
    spec->value.probes = std::move(names);
  });
}

lrq_status lrq_spec_validate(const lrq_experiment_spec* spec) {
  LRQ_REQUIRE_ARG(spec != nullptr, "lrq_spec_validate: spec is NULL");
  return guarded([&] { lrquad::validate(spec->value); });
}

lrq_status lrq_experiment_run(const lrq_experiment_spec* spec, lrq_report** out) {
  LRQ_REQUIRE_ARG(spec != nullptr && out != nullptr, "lrq_experiment_run: NULL argument");
  return guarded([&] {
    auto report = std::make_unique<lrq_report>();
    report->value = lrquad::run_experiment(spec->value);
    report->csv = lrquad::report_csv(report->value);
    report->trials_csv = lrquad::trials_csv(report->value);
    report->json = lrquad::report_json(report->value, false);
    report->json_timed = lrquad::report_json(report->value, true);
    *out = report.release();
  });
}

void lrq_report_destroy(lrq_report* report) { delete report; }

const char* lrq_report_csv(const lrq_report* report) { return report ? report->csv.c_str() : ""; }

const char* lrq_report_trials_csv(const lrq_report* report) { return report ? report->trials_csv.c_str() : ""; }

const char* lrq_report_json(const lrq_report* report) { return report ? report->json.c_str() : ""; }

const char* lrq_report_json_timed(const lrq_report* report) { return report ? report->json_timed.c_str() : ""; }

int lrq_report_all_passed(const lrq_report* report) { return report && report->value.all_passed ? 1 : 0; }

size_t lrq_report_cell_count(const lrq_report* report) { return report ? report->value.cells.size() : 0; }

lrq_status lrq_report_cell_success_rate(const lrq_report* report, size_t index, double* out) {
  LRQ_REQUIRE_ARG(report != nullptr && out != nullptr, "lrq_report_cell_success_rate: NULL argument");
  LRQ_REQUIRE_ARG(index < report->value.cells.size(), "lrq_report_cell_success_rate: index out of range");
  *out = report->value.cells[index].success_rate;
  last_error.clear();
  return LRQ_OK;
}

lrq_status lrq_write_file(const char* path, const char* text) {
  LRQ_REQUIRE_ARG(path != nullptr && text != nullptr, "lrq_write_file: NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) lrquad::fail(lrquad::Errc::io, std::string("cannot open '") + path + "' for writing");
    out << text;
    out.close();
    if (!out) lrquad::fail(lrquad::Errc::io, std::string("failed writing '") + path + "'");
  });
}

}  // extern "C"
