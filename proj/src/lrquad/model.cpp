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

#include "lrquad/model.hpp"

#include <sstream>

#include "lrquad/error.hpp"

namespace lrquad {

Vector gram_spectrum(const Matrix& x) {
  const Matrix gram = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, Errc::not_converged, "gram_spectrum: eigensolver failed");
  return solver.eigenvalues().reverse();
}

TargetMatrix::TargetMatrix(Matrix x) : x_(std::move(x)) {
  require(x_.rows() >= 1 && x_.cols() >= 1, Errc::invalid_argument, "TargetMatrix: empty matrix");
  require(x_.allFinite(), Errc::non_finite, "TargetMatrix: non-finite entries");
  spectrum_ = gram_spectrum(x_);
  require(spectrum_(spectrum_.size() - 1) > 0, Errc::invalid_argument, "TargetMatrix: X is rank deficient");
}

TargetMatrix random_target(Eigen::Index n, Eigen::Index r, const RngStream& stream) {
  require(r >= 1, Errc::invalid_argument, "random_target: r must be >= 1");
  if (r >= n) {
    std::ostringstream os;
    os << "random_target: need r < n (got n = " << n << ", r = " << r << ")";
    fail(Errc::invalid_argument, os.str());
  }
  for (std::uint64_t attempt = 0;; ++attempt) {
    Matrix x = gaussian_matrix(n, r, attempt == 0 ? stream : stream.child(attempt));
    const Vector spec = gram_spectrum(x);
    if (spec(r - 1) >= 1e-8 * spec(0)) return TargetMatrix(std::move(x));
  }
}

SensingEnsemble gaussian_ensemble(Eigen::Index m, Eigen::Index n, const RngStream& stream) {
  return SensingEnsemble{gaussian_matrix(m, n, stream)};
}

MeasurementSet measure(const Matrix& x, const SensingEnsemble& ensemble) {
  if (ensemble.n() != x.rows()) {
    std::ostringstream os;
    os << "measure: ensemble has " << ensemble.n() << " columns but X has " << x.rows() << " rows";
    fail(Errc::dimension_mismatch, os.str());
  }
  MeasurementSet out;
  out.y = (ensemble.a * x).rowwise().squaredNorm();
  return out;
}

MeasurementSet add_noise(const MeasurementSet& y, double sigma, const RngStream& stream) {
  require(sigma >= 0, Errc::invalid_argument, "add_noise: sigma must be >= 0");
  if (sigma == 0) return y;
  MeasurementSet out = y;
  out.y += sigma * gaussian_vector(y.m(), stream);
  out.noise_sigma = sigma;
  out.noiseless = false;
  return out;
}

}  // namespace lrquad
