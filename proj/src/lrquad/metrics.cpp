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

#include "lrquad/metrics.hpp"

#include <sstream>

#include "lrquad/error.hpp"

namespace lrquad {

namespace {

void check_shapes(const Matrix& u, const Matrix& x) {
  if (u.rows() != x.rows() || u.cols() != x.cols()) {
    std::ostringstream os;
    os << "procrustes_align: U is " << u.rows() << "x" << u.cols() << " but X is " << x.rows() << "x"
       << x.cols();
    fail(Errc::dimension_mismatch, os.str());
  }
}

Matrix optimal_rotation(const Matrix& u, const Matrix& x) {
  const SvdTriplet svd = small_svd(x.transpose() * u);
  return svd.w * svd.v.transpose();
}

}  // namespace

double orbit_distance(const Matrix& u, const Matrix& x) {
  check_shapes(u, x);
  return (x * optimal_rotation(u, x) - u).norm();
}

Alignment procrustes_align(const Matrix& u, const Matrix& x) {
  check_shapes(u, x);
  const double x_norm = x.norm();
  require(x_norm > 0, Errc::invalid_argument, "procrustes_align: X is zero, relative error undefined");
  Alignment out;
  out.o_star = optimal_rotation(u, x);
  out.distance = (x * out.o_star - u).norm();
  out.relative_error = out.distance / x_norm;
  return out;
}

double relative_error(const Matrix& u, const Matrix& x) { return procrustes_align(u, x).relative_error; }

}  // namespace lrquad
