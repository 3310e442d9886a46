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

// Command-line harness: experiments, probes and blind recovery on top of the
// lrquad C interface.

#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrquad/lrquad.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct MatrixDeleter {
  void operator()(lrq_matrix* m) const { lrq_matrix_destroy(m); }
};
struct SpecDeleter {
  void operator()(lrq_experiment_spec* s) const { lrq_spec_destroy(s); }
};
struct ReportDeleter {
  void operator()(lrq_report* r) const { lrq_report_destroy(r); }
};
struct RunDeleter {
  void operator()(lrq_run* r) const { lrq_run_destroy(r); }
};
using MatrixPtr = std::unique_ptr<lrq_matrix, MatrixDeleter>;
using SpecPtr = std::unique_ptr<lrq_experiment_spec, SpecDeleter>;
using ReportPtr = std::unique_ptr<lrq_report, ReportDeleter>;
using RunPtr = std::unique_ptr<lrq_run, RunDeleter>;

/// Thrown to unwind to main with a chosen exit status.
struct Exit {
  int code;
};

int exit_code_for(lrq_status status) {
  switch (status) {
    case LRQ_OK: return kExitOk;
    case LRQ_ERR_INVALID_ARGUMENT:
    case LRQ_ERR_DIMENSION_MISMATCH:
    case LRQ_ERR_DEGENERATE_MEASUREMENTS:
    case LRQ_ERR_IO:
    case LRQ_ERR_PARSE:
    case LRQ_ERR_UNKNOWN_PROBE: return kExitUsage;
    default: return kExitFailed;
  }
}

void check(lrq_status status) {
  if (status == LRQ_OK) return;
  std::cerr << "lrquad: " << lrq_status_string(status) << ": " << lrq_last_error() << "\n";
  throw Exit{exit_code_for(status)};
}

void usage_error(const std::string& message) {
  std::cerr << "lrquad: " << message << "\n";
  throw Exit{kExitUsage};
}

// Fails early, before any work, when an output file cannot be created.
void ensure_writable(const std::string& path) {
  if (path.empty() || path == "-") return;
  std::ofstream probe(path, std::ios::app);
  if (!probe) usage_error("output path '" + path + "' is not writable");
}

void emit(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    std::fflush(stdout);
    return;
  }
  check(lrq_write_file(path.c_str(), text));
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

/// Flags shared by the experiment subcommands. Unset flags keep the
/// per-experiment defaults of the library.
struct ExperimentFlags {
  std::size_t n = 0, r = 0;
  std::vector<std::string> m;
  int trials = 0;
  std::vector<double> alphas;
  double alpha_y = 0, step_c = 0, sigma = 0, tol = 0;
  std::uint64_t seed = 0;
  std::string variant;
  int max_iters = 0;
  unsigned threads = 1;
  std::string out, json, per_trial;
  bool timing = false;
  CLI::App* app = nullptr;

  bool given(const char* name) const { return app->count(name) > 0; }
};

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f, bool solver_flags) {
  f.app = sub;
  sub->add_option("--n", f.n, "Ambient dimension n");
  sub->add_option("--r", f.r, "Rank r");
  sub->add_option("--m", f.m, "Measurement counts: absolute (400) or multiples of n*r (2nr)")->delimiter(',');
  sub->add_option("--trials", f.trials, "Trials per grid point");
  sub->add_option("--alpha-y", f.alpha_y, "Truncation parameter of the spectral initialization");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "Primary CSV output path (default stdout)");
  sub->add_option("--json", f.json, "JSON report path");
  if (!solver_flags) return;
  sub->add_option("--alpha", f.alphas, "Exponential weight parameter(s), comma separated")->delimiter(',');
  sub->add_option("--step-c", f.step_c, "Step constant c in mu = c m / sum(y)");
  sub->add_option("--sigma", f.sigma, "Standard deviation of additive measurement noise");
  sub->add_option("--variant", f.variant, "Solver variant")->check(CLI::IsMember({"exp", "plain", "both"}));
  sub->add_option("--max-iters", f.max_iters, "Iteration budget T");
  sub->add_option("--tol", f.tol, "Success threshold on the relative error");
  sub->add_option("--per-trial", f.per_trial, "Per-trial CSV output path");
  sub->add_flag("--timing", f.timing, "Include wall times in the JSON report");
}

SpecPtr build_spec(lrq_experiment_kind kind, const ExperimentFlags& f) {
  lrq_experiment_spec* raw = nullptr;
  check(lrq_spec_create(kind, &raw));
  SpecPtr spec(raw);
  if (f.given("--n") || f.given("--r")) {
    std::size_t n = f.n, r = f.r;
    if (!f.given("--n")) n = kind == LRQ_EXPERIMENT_INIT_QUALITY ? 100 : 200;
    if (!f.given("--r")) r = 2;
    if (r < 1 || r >= n) usage_error("need 1 <= r < n (got n = " + std::to_string(n) + ", r = " + std::to_string(r) + ")");
    check(lrq_spec_set_size(spec.get(), n, r));
  }
  if (f.given("--m")) check(lrq_spec_set_m_grid(spec.get(), join(f.m).c_str()));
  if (f.given("--trials")) check(lrq_spec_set_trials(spec.get(), f.trials));
  if (f.given("--alpha-y")) check(lrq_spec_set_alpha_y(spec.get(), f.alpha_y));
  if (f.given("--seed")) check(lrq_spec_set_seed(spec.get(), f.seed));
  check(lrq_spec_set_threads(spec.get(), f.threads));
  if (f.app->get_option_no_throw("--alpha") != nullptr) {
    if (f.given("--alpha")) check(lrq_spec_set_alphas(spec.get(), f.alphas.data(), f.alphas.size()));
    if (f.given("--step-c")) check(lrq_spec_set_step_c(spec.get(), f.step_c));
    if (f.given("--sigma")) check(lrq_spec_set_sigma(spec.get(), f.sigma));
    if (f.given("--max-iters")) check(lrq_spec_set_max_iters(spec.get(), f.max_iters));
    if (f.given("--tol")) check(lrq_spec_set_tol(spec.get(), f.tol));
    if (f.given("--variant")) {
      const int mask = f.variant == "exp" ? LRQ_VARIANTS_EXPONENTIAL
                       : f.variant == "plain" ? LRQ_VARIANTS_PLAIN
                                              : LRQ_VARIANTS_BOTH;
      check(lrq_spec_set_variants(spec.get(), mask));
    }
  }
  return spec;
}

ReportPtr run_spec(const lrq_experiment_spec* spec, const ExperimentFlags& f) {
  check(lrq_spec_validate(spec));
  ensure_writable(f.out);
  ensure_writable(f.json);
  ensure_writable(f.per_trial);
  lrq_report* raw = nullptr;
  check(lrq_experiment_run(spec, &raw));
  return ReportPtr(raw);
}

void write_outputs(const lrq_report* report, const ExperimentFlags& f) {
  emit(f.out, lrq_report_csv(report));
  if (!f.json.empty()) emit(f.json, f.timing ? lrq_report_json_timed(report) : lrq_report_json(report));
  if (!f.per_trial.empty()) emit(f.per_trial, lrq_report_trials_csv(report));
}

MatrixPtr read_matrix(const std::string& path) {
  lrq_matrix* raw = nullptr;
  check(lrq_matrix_read_text(path.c_str(), &raw));
  return MatrixPtr(raw);
}

void print_matrix(const lrq_matrix* m) {
  const std::size_t rows = lrq_matrix_rows(m), cols = lrq_matrix_cols(m);
  std::vector<double> values(rows * cols);
  check(lrq_matrix_copy_to(m, values.data(), values.size()));
  std::printf("%zu %zu\n", rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) std::printf(j + 1 < cols ? "%.17g " : "%.17g\n", values[i * cols + j]);
}

const char* termination_name(lrq_termination t) {
  switch (t) {
    case LRQ_TERM_REACHED_TOLERANCE: return "reached_tolerance";
    case LRQ_TERM_STATIONARY: return "stationary";
    case LRQ_TERM_MAX_ITERS: return "max_iters";
    case LRQ_TERM_DIVERGED: return "diverged";
  }
  return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank recovery from quadratic measurements: experiments, probes and recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lrq_version());

  ExperimentFlags phase, conv, initq;
  auto* phase_cmd = app.add_subcommand("phase-transition", "Success rate versus m/nr");
  add_experiment_flags(phase_cmd, phase, true);

  auto* conv_cmd = app.add_subcommand("convergence", "Per-iteration relative error traces");
  add_experiment_flags(conv_cmd, conv, true);
  std::string conv_init = "spectral";
  conv_cmd->add_option("--init", conv_init, "Starting point")->check(CLI::IsMember({"spectral", "truth"}));

  auto* initq_cmd = app.add_subcommand("init-quality", "Initialization distance versus m");
  add_experiment_flags(initq_cmd, initq, false);

  auto* theory_cmd = app.add_subcommand("theory-check", "Run empirical probes of the analytical statements");
  std::vector<std::string> probes;
  std::uint64_t theory_seed = 1;
  unsigned theory_threads = 1;
  std::string theory_out;
  theory_cmd->add_option("--probes", probes, "Probe names (default suite if omitted)")->delimiter(',');
  theory_cmd->add_option("--seed", theory_seed, "Master seed");
  theory_cmd->add_option("--threads", theory_threads, "Worker threads")->check(CLI::PositiveNumber);
  theory_cmd->add_option("--out", theory_out, "JSON output path (default stdout)");

  auto* recover_cmd = app.add_subcommand("recover", "Recover U from A and y without ground truth");
  std::string a_path, y_path, u_out, summary_out, truth_path, rec_variant = "exp";
  std::size_t rec_r = 0;
  lrq_recover_options rec_opts;
  lrq_recover_options_init(&rec_opts);
  recover_cmd->add_option("--A", a_path, "Sensing matrix file (m x n)")->required();
  recover_cmd->add_option("--y", y_path, "Measurement file (m x 1)")->required();
  recover_cmd->add_option("--r", rec_r, "Rank r")->required();
  recover_cmd->add_option("--out", u_out, "Output path for the recovered U (default stdout)");
  recover_cmd->add_option("--summary", summary_out, "Run summary JSON path (default stderr)");
  recover_cmd->add_option("--truth", truth_path, "Optional ground-truth X for reporting the relative error");
  recover_cmd->add_option("--alpha", rec_opts.alpha, "Exponential weight parameter");
  recover_cmd->add_option("--alpha-y", rec_opts.alpha_y, "Truncation parameter");
  recover_cmd->add_option("--step-c", rec_opts.step_c, "Step constant c");
  recover_cmd->add_option("--max-iters", rec_opts.max_iters, "Iteration budget");
  recover_cmd->add_option("--grad-tol", rec_opts.grad_tol, "Gradient-norm stopping threshold");
  recover_cmd->add_option("--variant", rec_variant, "Solver variant")->check(CLI::IsMember({"exp", "plain"}));

  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic instance (X, A, y)");
  std::size_t gen_n = 200, gen_r = 2;
  std::string gen_m = "4nr", gen_dir = ".";
  double gen_sigma = 0.0;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--n", gen_n, "Ambient dimension n");
  gen_cmd->add_option("--r", gen_r, "Rank r");
  gen_cmd->add_option("--m", gen_m, "Measurement count (absolute or <k>nr)");
  gen_cmd->add_option("--sigma", gen_sigma, "Noise standard deviation");
  gen_cmd->add_option("--seed", gen_seed, "Master seed");
  gen_cmd->add_option("--out-dir", gen_dir, "Directory receiving X.txt, A.txt and y.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*phase_cmd) {
      auto spec = build_spec(LRQ_EXPERIMENT_PHASE_TRANSITION, phase);
      auto report = run_spec(spec.get(), phase);
      write_outputs(report.get(), phase);
      return kExitOk;
    }
    if (*conv_cmd) {
      auto spec = build_spec(LRQ_EXPERIMENT_CONVERGENCE, conv);
      check(lrq_spec_set_init_from_truth(spec.get(), conv_init == "truth"));
      auto report = run_spec(spec.get(), conv);
      write_outputs(report.get(), conv);
      return kExitOk;
    }
    if (*initq_cmd) {
      auto spec = build_spec(LRQ_EXPERIMENT_INIT_QUALITY, initq);
      auto report = run_spec(spec.get(), initq);
      write_outputs(report.get(), initq);
      return lrq_report_all_passed(report.get()) ? kExitOk : kExitFailed;
    }
    if (*theory_cmd) {
      lrq_experiment_spec* raw = nullptr;
      check(lrq_spec_create(LRQ_EXPERIMENT_THEORY_CHECK, &raw));
      SpecPtr spec(raw);
      check(lrq_spec_set_probes(spec.get(), join(probes).c_str()));
      check(lrq_spec_set_seed(spec.get(), theory_seed));
      check(lrq_spec_set_threads(spec.get(), theory_threads));
      check(lrq_spec_validate(spec.get()));
      ensure_writable(theory_out);
      lrq_report* rep = nullptr;
      check(lrq_experiment_run(spec.get(), &rep));
      ReportPtr report(rep);
      emit(theory_out, lrq_report_json(report.get()));
      if (!lrq_report_all_passed(report.get())) {
        std::cerr << "lrquad: at least one asserted probe failed\n";
        return kExitFailed;
      }
      return kExitOk;
    }
    if (*recover_cmd) {
      const MatrixPtr a = read_matrix(a_path);
      const MatrixPtr y = read_matrix(y_path);
      const std::size_t m_a = lrq_matrix_rows(a.get());
      const std::size_t n = lrq_matrix_cols(a.get());
      const std::size_t m_y = lrq_matrix_cols(y.get()) == 1 ? lrq_matrix_rows(y.get()) : lrq_matrix_cols(y.get());
      if (lrq_matrix_rows(y.get()) != 1 && lrq_matrix_cols(y.get()) != 1)
        usage_error("y must be a single column (got " + std::to_string(lrq_matrix_rows(y.get())) + "x" +
                    std::to_string(lrq_matrix_cols(y.get())) + ")");
      if (m_y != m_a)
        usage_error("y has " + std::to_string(m_y) + " entries but A has " + std::to_string(m_a) + " rows");
      if (rec_r < 1 || rec_r >= n)
        usage_error("need 1 <= r < n (got n = " + std::to_string(n) + ", r = " + std::to_string(rec_r) + ")");
      MatrixPtr truth;
      if (!truth_path.empty()) truth = read_matrix(truth_path);
      ensure_writable(u_out);
      ensure_writable(summary_out);
      rec_opts.variant = rec_variant == "plain" ? LRQ_VARIANT_PLAIN : LRQ_VARIANT_EXPONENTIAL;

      lrq_run* raw = nullptr;
      check(lrq_recover(a.get(), y.get(), rec_r, &rec_opts, &raw));
      RunPtr run(raw);
      lrq_matrix* sol_raw = nullptr;
      check(lrq_run_solution(run.get(), &sol_raw));
      MatrixPtr solution(sol_raw);

      nlohmann::json summary;
      summary["m"] = m_a;
      summary["n"] = n;
      summary["r"] = rec_r;
      summary["variant"] = rec_variant;
      summary["iterations"] = lrq_run_iterations(run.get());
      summary["converged"] = lrq_run_converged(run.get()) == 1;
      summary["termination"] = termination_name(lrq_run_termination(run.get()));
      summary["step_size"] = lrq_run_step_size(run.get());
      summary["kept_measurements"] = lrq_run_kept_count(run.get());
      const std::size_t len = lrq_run_trace_length(run.get());
      lrq_trace_record last{};
      check(lrq_run_trace_record(run.get(), len - 1, &last));
      summary["final_objective"] = last.objective;
      summary["final_grad_norm"] = last.grad_norm;
      if (truth) {
        double rel = 0.0;
        check(lrq_relative_error(solution.get(), truth.get(), &rel));
        summary["relative_error"] = rel;
      }
      const std::string summary_text = summary.dump(2) + "\n";
      if (summary_out.empty())
        std::cerr << summary_text;
      else
        emit(summary_out, summary_text.c_str());

      if (lrq_run_termination(run.get()) == LRQ_TERM_DIVERGED) {
        std::cerr << "lrquad: iteration diverged; try a smaller --step-c\n";
        return kExitFailed;
      }
      if (u_out.empty() || u_out == "-")
        print_matrix(solution.get());
      else
        check(lrq_matrix_write_text(solution.get(), u_out.c_str()));
      return kExitOk;
    }
    if (*gen_cmd) {
      const std::filesystem::path dir(gen_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (gen_r < 1 || gen_r >= gen_n)
        usage_error("need 1 <= r < n (got n = " + std::to_string(gen_n) + ", r = " + std::to_string(gen_r) + ")");
      std::size_t m = 0;
      if (gen_m.size() > 2 && gen_m.ends_with("nr")) {
        try {
          m = static_cast<std::size_t>(std::llround(std::stod(gen_m.substr(0, gen_m.size() - 2)) * gen_n * gen_r));
        } catch (const std::exception&) {
          usage_error("cannot parse --m '" + gen_m + "'");
        }
      } else {
        try {
          m = std::stoul(gen_m);
        } catch (const std::exception&) {
          usage_error("cannot parse --m '" + gen_m + "'");
        }
      }
      lrq_matrix *x = nullptr, *a = nullptr, *y = nullptr;
      check(lrq_generate(gen_n, gen_r, m, gen_sigma, gen_seed, &x, &a, &y));
      MatrixPtr xp(x), ap(a), yp(y);
      check(lrq_matrix_write_text(xp.get(), (dir / "X.txt").string().c_str()));
      check(lrq_matrix_write_text(ap.get(), (dir / "A.txt").string().c_str()));
      check(lrq_matrix_write_text(yp.get(), (dir / "y.txt").string().c_str()));
      return kExitOk;
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitUsage;
}
