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

#include "lrquad/initializer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrquad/error.hpp"

namespace lrquad {

Mask truncation_mask(const MeasurementSet& y, double alpha_y) {
  require(alpha_y > 0, Errc::invalid_argument, "truncation_mask: alpha_y must be positive");
  require(y.m() >= 1, Errc::invalid_argument, "truncation_mask: no measurements");
  const double total = y.y.sum();
  require(total > 0, Errc::degenerate_measurements, "truncation_mask: sum of measurements is not positive");
  const double threshold = alpha_y / static_cast<double>(y.m()) * total;
  return (y.y.array() <= threshold);
}

Matrix build_y(const SensingEnsemble& ensemble, const MeasurementSet& y, const Mask& mask) {
  if (ensemble.m() != y.m() || mask.size() != y.m()) {
    std::ostringstream os;
    os << "build_y: ensemble has " << ensemble.m() << " rows, y has " << y.m() << " entries, mask has "
       << mask.size();
    fail(Errc::dimension_mismatch, os.str());
  }
  const double m = static_cast<double>(y.m());
  const Vector coeff = (mask.cast<double>() * y.y.array() / m).matrix();
  const Matrix full = ensemble.a.transpose() * (coeff.asDiagonal() * ensemble.a);
  // Mirror the lower triangle so Y == Y^T holds bit for bit.
  return full.selfadjointView<Eigen::Lower>();
}

InitResult spectral_init(const SensingEnsemble& ensemble, const MeasurementSet& y, Eigen::Index r,
                         const InitConfig& cfg) {
  const Eigen::Index n = ensemble.n();
  if (r < 1 || r >= n) {
    std::ostringstream os;
    os << "spectral_init: need 1 <= r < n (got n = " << n << ", r = " << r << ")";
    fail(Errc::invalid_argument, os.str());
  }
  const Mask mask = truncation_mask(y, cfg.alpha_y);
  const Matrix big_y = build_y(ensemble, y, mask);
  const EigenPairs eig = sym_top_eigs(big_y, r + 1, cfg.eig_tol);

  InitResult out;
  out.kept_count = mask.count();
  out.lambda = eig.values;
  Vector root(r);
  for (Eigen::Index i = 0; i < r; ++i)
    root(i) = std::sqrt(std::max(0.0, 0.5 * (eig.values(i) - eig.values(r))));
  out.u0 = eig.vectors.leftCols(r) * root.asDiagonal();
  return out;
}

}  // namespace lrquad
