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
#include <string_view>
#include <vector>

#include "lrquad/model.hpp"

namespace lrquad {

enum class Variant { exponential, plain };

std::string_view to_string(Variant v) noexcept;

/// Step-size rules:
///  - empirical: mu = c * m / sum(y)
///  - theory:    mu = sigma_r^3 / (c2 * sigma_1 * |X|_F^6), c2 defaulting to 125 alpha^2
///  - fixed:     mu as given
struct StepRule {
  enum class Kind { empirical, theory, fixed };
  Kind kind = Kind::empirical;
  double c = 0.1;
  double c2 = 0.0;  // 0 selects 125 alpha^2
  double mu = 0.0;
};

struct SolverConfig {
  double alpha = 20.0;
  StepRule step;
  int max_iters = 3000;
  double success_tol = 1e-5;
  // Stationarity threshold when no target is supplied; default 1e-10 max(1, f_w(U0)).
  std::optional<double> grad_tol;
  Variant variant = Variant::exponential;
  bool keep_iterates = false;
};

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;           // f(U_k)
  double weighted_objective = 0.0;  // f_w(U_k)
  double grad_norm = 0.0;           // |grad f_w(U_k)|_F
  double relative_error = 0.0;      // NaN when no target is known
};

enum class Termination { reached_tolerance, stationary, max_iters, diverged };

std::string_view to_string(Termination t) noexcept;

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<Matrix> iterates;  // U_0, U_1, ... when keep_iterates is set
  Matrix u;                      // final iterate
  int iterations = 0;            // number of updates applied
  bool converged = false;
  Termination termination = Termination::max_iters;
  double step_size = 0.0;
};

/// w_i = exp(-m y_i / (alpha sum_k y_k)). Negative (noisy) y_i give w_i > 1.
Vector exp_weights(const MeasurementSet& y, double alpha);

/// Gradient of f_w(U) = (1/4m) sum_i w_i (y_i - |a_i^T U|^2)^2 with w held fixed:
/// (1/m) sum_i w_i (|a_i^T U|^2 - y_i) a_i a_i^T U.
Matrix exp_gradient(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y,
                    const Vector& w);
Matrix plain_gradient(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y);

/// f(U), or f_w(U) when weights are given.
double objective(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y,
                 const Vector* w = nullptr);

/// spectrum is required for the theory rule (eigenvalues of X X^T, descending).
double step_size(const StepRule& rule, const MeasurementSet& y, const Vector* spectrum, double alpha);

void validate(const SolverConfig& cfg);

/// Iterates U_{k+1} = U_k - mu grad f_w(U_k). Stops when the relative error to
/// target drops below success_tol, or (without target) when the gradient norm
/// drops below grad_tol, or after max_iters updates. A non-finite iterate or
/// |U_k|_F > 1e6 |U_0|_F ends the run with Termination::diverged.
RunTrace run(const SensingEnsemble& ensemble, const MeasurementSet& y, const Matrix& u0,
             const SolverConfig& cfg, const TargetMatrix* target = nullptr);

}  // namespace lrquad
