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

#include "lrquad/model.hpp"

namespace lrquad {

/// Measurements above alpha_y times the sample mean of y are dropped.
struct InitConfig {
  double alpha_y = 9.0;
  double eig_tol = 1e-10;
};

struct InitResult {
  Matrix u0;                  // n x r
  Eigen::Index kept_count = 0;
  Vector lambda;              // lambda_1 >= ... >= lambda_{r+1} of Y
};

/// mask_i = (y_i <= alpha_y / m * sum_k y_k). Throws degenerate_measurements if sum y <= 0.
Mask truncation_mask(const MeasurementSet& y, double alpha_y);

/// Y = (1/m) sum_{mask_i} y_i a_i a_i^T, exactly symmetric.
Matrix build_y(const SensingEnsemble& ensemble, const MeasurementSet& y, const Mask& mask);

/// Truncated spectral initialization U0 = U Sigma^{1/2} with
/// Sigma_ii = max(0, (lambda_i - lambda_{r+1}) / 2).
InitResult spectral_init(const SensingEnsemble& ensemble, const MeasurementSet& y, Eigen::Index r,
                         const InitConfig& cfg = {});

}  // namespace lrquad
