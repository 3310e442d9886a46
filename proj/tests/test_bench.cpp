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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "lrquad/bench.hpp"
#include "lrquad/error.hpp"
#include "lrquad/metrics.hpp"

using namespace lrquad;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an lrquad::Error");
  return Errc::invalid_argument;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

ExperimentSpec small_phase_spec() {
  ExperimentSpec spec = default_spec(ExperimentKind::phase_transition);
  spec.n = 20;
  spec.r = 1;
  spec.m_grid = {parse_sample_count("2nr"), parse_sample_count("6nr")};
  spec.trials = 6;
  spec.max_iters = 500;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST_CASE("parse_sample_count") {
  const SampleCount a = parse_sample_count("400");
  CHECK(!a.per_nr);
  CHECK(a.resolve(200, 2) == 400);
  const SampleCount b = parse_sample_count("2.5nr");
  CHECK(b.per_nr);
  CHECK(b.resolve(200, 2) == 1000);
  CHECK(parse_sample_count(" 3nr ").resolve(10, 3) == 90);
  for (const char* bad : {"", "nr", "abc", "4xr", "-3", "1.5", "0"})
    CHECK(code_of([&] { parse_sample_count(bad); }) == Errc::parse);
}

TEST_CASE("default specs") {
  const ExperimentSpec pt = default_spec(ExperimentKind::phase_transition);
  CHECK(pt.n == 200);
  CHECK(pt.r == 2);
  CHECK(pt.trials == 100);
  CHECK(pt.m_grid.size() == 7);
  CHECK(pt.m_grid.front().resolve(200, 2) == 400);
  CHECK(pt.m_grid.back().resolve(200, 2) == 1600);
  CHECK(pt.variants.size() == 2);
  CHECK(pt.alphas == std::vector<double>{20.0});
  CHECK(pt.alpha_y == 9.0);
  CHECK(pt.step_c == 0.1);
  CHECK(pt.max_iters == 3000);
  CHECK(pt.tol == 1e-5);

  const ExperimentSpec cv = default_spec(ExperimentKind::convergence);
  CHECK(cv.alphas == std::vector<double>{20.0, 100.0});
  CHECK(cv.m_grid.size() == 1);
  CHECK(cv.m_grid[0].resolve(200, 2) == 1200);

  const ExperimentSpec iq = default_spec(ExperimentKind::init_quality);
  CHECK(iq.n == 100);
  CHECK(iq.trials == 20);
  CHECK(iq.m_grid.size() == 3);

  CHECK(default_spec(ExperimentKind::theory_check).probes == default_probe_suite());
  for (auto k : {ExperimentKind::phase_transition, ExperimentKind::convergence, ExperimentKind::init_quality,
                 ExperimentKind::theory_check})
    CHECK_NOTHROW(validate(default_spec(k)));
}

TEST_CASE("validate rejects bad specs") {
  auto with = [](auto mutate) {
    ExperimentSpec s = small_phase_spec();
    mutate(s);
    return code_of([&] { validate(s); });
  };
  CHECK(with([](ExperimentSpec& s) { s.trials = 0; }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.r = s.n; }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.sigma = -1; }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.alphas = {-2}; }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.alphas.clear(); }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.m_grid.clear(); }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.variants.clear(); }) == Errc::invalid_argument);
  CHECK(with([](ExperimentSpec& s) { s.threads = 0; }) == Errc::invalid_argument);

  ExperimentSpec theory = default_spec(ExperimentKind::theory_check);
  theory.probes = {"concentration", "foo"};
  CHECK(code_of([&] { validate(theory); }) == Errc::unknown_probe);
  CHECK(code_of([&] { run_experiment(theory); }) == Errc::unknown_probe);

  ExperimentSpec plain_only = small_phase_spec();
  plain_only.variants = {Variant::plain};
  plain_only.alphas.clear();
  CHECK_NOTHROW(validate(plain_only));
}

TEST_CASE("phase transition csv is deterministic across thread counts") {
  ExperimentSpec spec = small_phase_spec();
  const ExperimentReport one = run_experiment(spec);
  spec.threads = 4;
  const ExperimentReport four = run_experiment(spec);
  CHECK(report_csv(one) == report_csv(four));
  CHECK(trials_csv(one) == trials_csv(four));
  CHECK(report_json(one) == report_json(four));
  CHECK(report_csv(one) == report_csv(run_experiment(small_phase_spec())));

  const std::string csv = report_csv(one);
  CHECK(first_line(csv) ==
        "variant,alpha,m,m_over_nr,trials,successes,success_rate,mean_final_rel_error,median_final_rel_error,"
        "mean_iterations");
  CHECK(line_count(csv) == 1 + 4);
  CHECK(first_line(trials_csv(one)) ==
        "variant,alpha,m,trial,success,init_rel_error,final_rel_error,iterations,termination");
  CHECK(line_count(trials_csv(one)) == 1 + 2 * 2 * 6);

  REQUIRE(one.cells.size() == 4);
  for (const auto& c : one.cells) {
    CHECK(c.trials == 6);
    CHECK(c.success_rate == doctest::Approx(c.successes / 6.0));
    if (c.variant == Variant::plain) CHECK(std::isnan(c.alpha));
  }
  // With 6nr measurements the exponential variant should recover every trial.
  CHECK(one.cells[1].variant == Variant::exponential);
  CHECK(one.cells[1].m == 120);
  CHECK(one.cells[1].success_rate == 1.0);

  const auto doc = nlohmann::json::parse(report_json(one));
  CHECK(doc.at("spec").at("kind") == "phase_transition");
  CHECK(report_json(one).find("wall_time") == std::string::npos);
  CHECK(report_json(one, true).find("wall_time") != std::string::npos);
}

TEST_CASE("other experiment kinds") {
  ExperimentSpec cv = default_spec(ExperimentKind::convergence);
  cv.n = 15;
  cv.r = 1;
  cv.max_iters = 300;
  const ExperimentReport conv = run_experiment(cv);
  CHECK(first_line(report_csv(conv)) ==
        "variant,alpha,trial,iteration,relative_error,objective,weighted_objective,grad_norm");
  CHECK(!conv.rows.empty());
  CHECK(conv.rows.front().record.iteration == 0);

  cv.init_from_truth = true;
  const ExperimentReport truth = run_experiment(cv);
  for (const auto& row : truth.rows) CHECK(row.record.iteration == 0);

  ExperimentSpec iq = default_spec(ExperimentKind::init_quality);
  iq.n = 20;
  iq.trials = 4;
  const ExperimentReport init = run_experiment(iq);
  CHECK(first_line(report_csv(init)) == "m,m_over_nr,trials,fraction_within,median_d2_over_sigma_r");
  CHECK(line_count(report_csv(init)) == 4);

  ExperimentSpec th = default_spec(ExperimentKind::theory_check);
  th.probes = {"concentration", "contraction"};
  const ExperimentReport theory = run_experiment(th);
  CHECK(first_line(report_csv(theory)) == "probe,asserted,passed");
  REQUIRE(theory.probes.size() == 2);
  CHECK(theory.probes[0].name == "concentration");
  CHECK(!theory.probes[1].asserted);
  CHECK(theory.all_passed);
}

TEST_CASE("matrix text round trip and errors") {
  Matrix m(2, 3);
  m << 1.0 / 3.0, -2.5e-300, 7, std::numeric_limits<double>::max(), 0.1, -0.0;
  const Matrix back = parse_matrix_text(format_matrix_text(m), "inline");
  CHECK(back == m);
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");

  CHECK(code_of([] { parse_matrix_text("", "x"); }) == Errc::parse);
  CHECK(code_of([] { parse_matrix_text("2 2\n1 2\n3\n", "x"); }) == Errc::parse);
  CHECK(code_of([] { parse_matrix_text("1 2\n1 abc\n", "x"); }) == Errc::parse);
  CHECK(code_of([] { parse_matrix_text("1 1\n1\n2\n", "x"); }) == Errc::parse);
  CHECK(code_of([] { parse_matrix_text("0 1\n", "x"); }) == Errc::parse);
  CHECK(code_of([] { read_matrix_text("/nonexistent/dir/m.txt"); }) == Errc::io);
  CHECK(code_of([&] { write_matrix_text(m, "/nonexistent/dir/m.txt"); }) == Errc::io);

  const auto path = std::filesystem::temp_directory_path() / "lrquad_test_matrix.txt";
  write_matrix_text(m, path.string());
  CHECK(read_matrix_text(path.string()) == m);
  std::filesystem::remove(path);
}

TEST_CASE("blind recovery round trip") {
  const Problem p = make_problem(20, 2, 8 * 40, 0.0, trial_stream(5, 0, 0));
  const RecoverResult res = recover(p.ensemble, p.y, 2, RecoverOptions{});
  CHECK(res.trace.termination == Termination::stationary);
  CHECK(relative_error(res.trace.u, p.target.x()) < 1e-4);

  MeasurementSet short_y = p.y;
  short_y.y.conservativeResize(10);
  CHECK(code_of([&] { recover(p.ensemble, short_y, 2, RecoverOptions{}); }) == Errc::dimension_mismatch);
  CHECK(code_of([&] { recover(p.ensemble, p.y, 20, RecoverOptions{}); }) == Errc::invalid_argument);
}
