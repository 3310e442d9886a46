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
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "lrquad/lrquad.h"

namespace {

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(lrq_version()) == "1.0.0");
  CHECK(std::string(lrq_status_string(LRQ_OK)) == "ok");
  CHECK(std::string(lrq_status_string(LRQ_ERR_UNKNOWN_PROBE)) == "unknown probe");
  CHECK(std::string(lrq_status_string(static_cast<lrq_status>(42))) == "unknown status");
}

TEST_CASE("matrix handles are row major") {
  const double data[] = {1, 2, 3, 4, 5, 6};
  lrq_matrix* m = nullptr;
  REQUIRE(lrq_matrix_create(2, 3, data, &m) == LRQ_OK);
  CHECK(lrq_matrix_rows(m) == 2);
  CHECK(lrq_matrix_cols(m) == 3);
  CHECK(lrq_matrix_get(m, 0, 2) == 3);
  CHECK(lrq_matrix_get(m, 1, 0) == 4);
  CHECK(std::isnan(lrq_matrix_get(m, 5, 0)));
  double back[6] = {};
  CHECK(lrq_matrix_copy_to(m, back, 6) == LRQ_OK);
  CHECK(std::memcmp(back, data, sizeof data) == 0);
  CHECK(lrq_matrix_copy_to(m, back, 5) == LRQ_ERR_INVALID_ARGUMENT);

  const std::string path = temp_path("lrquad_capi_matrix.txt");
  CHECK(lrq_matrix_write_text(m, path.c_str()) == LRQ_OK);
  lrq_matrix* read = nullptr;
  REQUIRE(lrq_matrix_read_text(path.c_str(), &read) == LRQ_OK);
  CHECK(lrq_matrix_get(read, 1, 2) == 6);
  std::filesystem::remove(path);
  lrq_matrix_destroy(read);
  lrq_matrix_destroy(m);
  lrq_matrix_destroy(nullptr);

  lrq_matrix* zero = nullptr;
  REQUIRE(lrq_matrix_create(2, 2, nullptr, &zero) == LRQ_OK);
  CHECK(lrq_matrix_get(zero, 1, 1) == 0);
  lrq_matrix_destroy(zero);
}

TEST_CASE("error codes and last error") {
  lrq_matrix* m = nullptr;
  CHECK(lrq_matrix_create(0, 3, nullptr, &m) == LRQ_ERR_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(std::strlen(lrq_last_error()) > 0);
  CHECK(lrq_matrix_read_text("/nonexistent/x.txt", &m) == LRQ_ERR_IO);
  CHECK(std::string(lrq_last_error()).find("/nonexistent/x.txt") != std::string::npos);

  const std::string path = temp_path("lrquad_capi_bad.txt");
  CHECK(lrq_write_file(path.c_str(), "2 2\n1 2\n") == LRQ_OK);
  CHECK(lrq_matrix_read_text(path.c_str(), &m) == LRQ_ERR_PARSE);
  std::filesystem::remove(path);

  lrq_experiment_spec* spec = nullptr;
  REQUIRE(lrq_spec_create(LRQ_EXPERIMENT_THEORY_CHECK, &spec) == LRQ_OK);
  CHECK(lrq_spec_set_probes(spec, "concentration,foo") == LRQ_OK);
  CHECK(lrq_spec_validate(spec) == LRQ_ERR_UNKNOWN_PROBE);
  lrq_report* report = nullptr;
  CHECK(lrq_experiment_run(spec, &report) == LRQ_ERR_UNKNOWN_PROBE);
  CHECK(report == nullptr);
  CHECK(lrq_spec_set_trials(spec, 0) == LRQ_ERR_INVALID_ARGUMENT);
  CHECK(lrq_spec_set_m_grid(spec, "12x") == LRQ_ERR_PARSE);
  lrq_spec_destroy(spec);

  lrq_matrix *a = nullptr, *y = nullptr;
  REQUIRE(lrq_generate(10, 1, 50, 0.0, 1, nullptr, &a, &y) == LRQ_OK);
  lrq_matrix* short_y = nullptr;
  REQUIRE(lrq_matrix_create(10, 1, nullptr, &short_y) == LRQ_OK);
  lrq_run* run = nullptr;
  CHECK(lrq_recover(a, short_y, 1, nullptr, &run) == LRQ_ERR_DIMENSION_MISMATCH);
  CHECK(lrq_recover(a, y, 10, nullptr, &run) == LRQ_ERR_INVALID_ARGUMENT);
  CHECK(lrq_recover(nullptr, y, 1, nullptr, &run) == LRQ_ERR_INVALID_ARGUMENT);
  lrq_matrix* zeros = nullptr;
  REQUIRE(lrq_matrix_create(50, 1, nullptr, &zeros) == LRQ_OK);
  CHECK(lrq_recover(a, zeros, 1, nullptr, &run) == LRQ_ERR_DEGENERATE_MEASUREMENTS);
  CHECK(run == nullptr);
  lrq_matrix_destroy(zeros);
  lrq_matrix_destroy(short_y);
  lrq_matrix_destroy(a);
  lrq_matrix_destroy(y);
}

TEST_CASE("generate and recover through the C interface") {
  lrq_matrix *x = nullptr, *a = nullptr, *y = nullptr;
  REQUIRE(lrq_generate(20, 2, 320, 0.0, 7, &x, &a, &y) == LRQ_OK);
  CHECK(lrq_matrix_rows(a) == 320);
  CHECK(lrq_matrix_cols(a) == 20);
  CHECK(lrq_matrix_rows(y) == 320);

  lrq_recover_options opts;
  lrq_recover_options_init(&opts);
  CHECK(opts.alpha == 20.0);
  CHECK(opts.alpha_y == 9.0);
  CHECK(opts.step_c == 0.1);
  CHECK(opts.max_iters == 3000);

  lrq_run* run = nullptr;
  REQUIRE(lrq_recover(a, y, 2, &opts, &run) == LRQ_OK);
  CHECK(lrq_run_converged(run) == 1);
  CHECK(lrq_run_termination(run) == LRQ_TERM_STATIONARY);
  CHECK(lrq_run_kept_count(run) > 300);
  CHECK(lrq_run_step_size(run) > 0);
  CHECK(lrq_run_trace_length(run) == static_cast<size_t>(lrq_run_iterations(run)) + 1);
  lrq_trace_record first, last;
  REQUIRE(lrq_run_trace_record(run, 0, &first) == LRQ_OK);
  REQUIRE(lrq_run_trace_record(run, lrq_run_trace_length(run) - 1, &last) == LRQ_OK);
  CHECK(std::isnan(first.relative_error));
  CHECK(last.weighted_objective < first.weighted_objective);
  CHECK(lrq_run_trace_record(run, lrq_run_trace_length(run), &last) == LRQ_ERR_INVALID_ARGUMENT);

  lrq_matrix* u = nullptr;
  REQUIRE(lrq_run_solution(run, &u) == LRQ_OK);
  double err = 1.0;
  REQUIRE(lrq_relative_error(u, x, &err) == LRQ_OK);
  CHECK(err < 1e-4);
  lrq_matrix* u0 = nullptr;
  REQUIRE(lrq_run_initial(run, &u0) == LRQ_OK);
  double init_err = 0.0;
  REQUIRE(lrq_relative_error(u0, x, &init_err) == LRQ_OK);
  CHECK(init_err > err);

  lrq_matrix_destroy(u0);
  lrq_matrix_destroy(u);
  lrq_run_destroy(run);
  lrq_matrix_destroy(x);
  lrq_matrix_destroy(a);
  lrq_matrix_destroy(y);
}

TEST_CASE("experiments through the C interface") {
  auto csv_of = [](unsigned threads) {
    lrq_experiment_spec* spec = nullptr;
    REQUIRE(lrq_spec_create(LRQ_EXPERIMENT_PHASE_TRANSITION, &spec) == LRQ_OK);
    CHECK(lrq_spec_set_size(spec, 15, 1) == LRQ_OK);
    CHECK(lrq_spec_set_m_grid(spec, "2nr, 60") == LRQ_OK);
    CHECK(lrq_spec_set_trials(spec, 4) == LRQ_OK);
    CHECK(lrq_spec_set_variants(spec, LRQ_VARIANTS_EXPONENTIAL) == LRQ_OK);
    const double alphas[] = {20.0, 50.0};
    CHECK(lrq_spec_set_alphas(spec, alphas, 2) == LRQ_OK);
    CHECK(lrq_spec_set_max_iters(spec, 400) == LRQ_OK);
    CHECK(lrq_spec_set_seed(spec, 99) == LRQ_OK);
    CHECK(lrq_spec_set_threads(spec, threads) == LRQ_OK);
    CHECK(lrq_spec_set_variants(spec, 0) == LRQ_ERR_INVALID_ARGUMENT);
    lrq_report* report = nullptr;
    REQUIRE(lrq_experiment_run(spec, &report) == LRQ_OK);
    CHECK(lrq_report_cell_count(report) == 4);
    double rate = -1;
    CHECK(lrq_report_cell_success_rate(report, 3, &rate) == LRQ_OK);
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
    CHECK(lrq_report_cell_success_rate(report, 4, &rate) == LRQ_ERR_INVALID_ARGUMENT);
    CHECK(lrq_report_all_passed(report) == 1);
    CHECK(std::string(lrq_report_json_timed(report)).find("wall_time") != std::string::npos);
    const std::string csv = std::string(lrq_report_csv(report)) + lrq_report_trials_csv(report) +
                            lrq_report_json(report);
    lrq_report_destroy(report);
    lrq_spec_destroy(spec);
    return csv;
  };
  CHECK(csv_of(1) == csv_of(3));
}
