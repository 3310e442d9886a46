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

#include <string>
#include <utility>
#include <vector>

#include "lrquad/model.hpp"
#include "lrquad/solver.hpp"

namespace lrquad {

/// Result of one empirical probe. `asserted` marks probes whose target has
/// every constant pinned; only those can fail.
struct ProbeReport {
  using Entries = std::vector<std::pair<std::string, double>>;

  std::string name;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  Entries parameters;
  Entries observed;
  Entries bounds;
  std::vector<double> series;  // optional per-sample values (margins, ratios, ...)
  bool asserted = false;
  bool passed = true;

  double observed_value(const std::string& key) const;
};

/// Draws m = ceil(16 n / delta^2) Gaussian vectors and compares
/// (1/m) sum a_i^T M a_i against (1 -+ delta) |M|_*. M must be PSD.
ProbeReport concentration_probe(const Matrix& m, double delta, const RngStream& stream);

/// The one-sided form that holds for any square M: ratio <= 1 + delta.
ProbeReport concentration_upper_probe(const Matrix& m, double delta, const RngStream& stream);

/// Closed form of E[(a^T H X^T a)^2] for orthogonal-column X:
/// sum_s |x_s|^2 |h_s|^2 + tr^2(X^T H) + tr((X^T H)^2).
double second_moment_closed_form(const Matrix& x, const Matrix& h);

/// Monte-Carlo check of the closed form and of the sigma_r / sigma_1 brackets.
/// H is first replaced by the aligned perturbation (U O*^T - X with U = X + H),
/// which makes H^T X symmetric.
ProbeReport expectation_identity_probe(const Matrix& x, const Matrix& h, std::int64_t samples,
                                       const RngStream& stream);

/// <grad, U - Xbar> - (sigma_r / 7) |U - Xbar|^2 - |grad|^2 / (lambda |X|^2) with
/// lambda = 250 alpha^2 sigma_1 |X|_F^4 / sigma_r^3.
double regularity_margin(const SensingEnsemble& ensemble, const MeasurementSet& y, const TargetMatrix& x,
                         const Matrix& u, double alpha);

/// Samples `count` matrices within d(U) <= sqrt(sigma_r / 8) of a target
/// normalized to |X|_F = 1 (y rescaled to match) and reports the margins.
ProbeReport regularity_probe(const SensingEnsemble& ensemble, const MeasurementSet& y, const TargetMatrix& x,
                             double alpha, int count, const RngStream& stream, bool assert_margin);

/// Ratios d(U_{k+1}) / d(U_k) over iterations with d(U_k) <= sqrt(sigma_r / 8)
/// against (1 - 2 mu sigma_r / 7)^{1/2}. Informational.
ProbeReport contraction_probe(const RunTrace& trace, const TargetMatrix& x, double mu);

/// Per m in m_list: fraction of trials with d(U0) <= sqrt(sigma_r / 8) and the
/// median d(U0)^2 / sigma_r. Asserts the median is non-increasing in m.
ProbeReport init_quality_probe(Eigen::Index n, Eigen::Index r, const std::vector<Eigen::Index>& m_list,
                               int trials, double alpha_y, const RngStream& stream);

}  // namespace lrquad
