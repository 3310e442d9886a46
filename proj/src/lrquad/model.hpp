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

#include "lrquad/numerics.hpp"

namespace lrquad {

/// Ground truth X (n x r) with the nonzero eigenvalues of X X^T cached in
/// descending order.
class TargetMatrix {
 public:
  /// Validates rank: throws invalid_argument if any sigma_i is not positive.
  explicit TargetMatrix(Matrix x);

  const Matrix& x() const noexcept { return x_; }
  const Vector& spectrum() const noexcept { return spectrum_; }
  Eigen::Index n() const noexcept { return x_.rows(); }
  Eigen::Index r() const noexcept { return x_.cols(); }
  double sigma_max() const noexcept { return spectrum_(0); }
  double sigma_min() const noexcept { return spectrum_(spectrum_.size() - 1); }
  double kappa() const noexcept { return sigma_max() / sigma_min(); }
  double frobenius_sq() const noexcept { return spectrum_.sum(); }

 private:
  Matrix x_;
  Vector spectrum_;
};

/// Eigenvalues of X^T X in descending order (equal to the nonzero spectrum of X X^T).
Vector gram_spectrum(const Matrix& x);

struct SensingEnsemble {
  Matrix a;  // m x n, row i is a_i^T
  Eigen::Index m() const noexcept { return a.rows(); }
  Eigen::Index n() const noexcept { return a.cols(); }
};

struct MeasurementSet {
  Vector y;
  double noise_sigma = 0.0;
  bool noiseless = true;
  Eigen::Index m() const noexcept { return y.size(); }
};

/// Gaussian target; resamples (from derived child streams) until sigma_r >= 1e-8 sigma_1.
TargetMatrix random_target(Eigen::Index n, Eigen::Index r, const RngStream& stream);

SensingEnsemble gaussian_ensemble(Eigen::Index m, Eigen::Index n, const RngStream& stream);

/// y_i = |a_i^T X|^2.
MeasurementSet measure(const Matrix& x, const SensingEnsemble& ensemble);
inline MeasurementSet measure(const TargetMatrix& x, const SensingEnsemble& ensemble) {
  return measure(x.x(), ensemble);
}

/// y_i + eps_i with eps_i ~ N(0, sigma^2).
MeasurementSet add_noise(const MeasurementSet& y, double sigma, const RngStream& stream);

}  // namespace lrquad
