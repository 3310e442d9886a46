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

#include <doctest.h>

#include "lrquad/error.hpp"
#include "lrquad/metrics.hpp"
#include "oracles.hpp"

using namespace lrquad;

TEST_CASE("procrustes identity and sign cases") {
  const Matrix x = gaussian_matrix(6, 2, RngStream(1, 0));
  const Alignment al = procrustes_align(x, x);
  CHECK(al.distance < 1e-12);
  CHECK((al.o_star - Matrix::Identity(2, 2)).norm() < 1e-12);

  const Matrix v = gaussian_matrix(5, 1, RngStream(1, 1));
  CHECK(relative_error(-v, v) < 1e-15);
  CHECK(relative_error(Matrix::Zero(5, 1), v) == doctest::Approx(1.0));
  CHECK(relative_error(2.0 * v, v) == doctest::Approx(1.0));
  CHECK(relative_error(v, v) == 0.0);
}

TEST_CASE("procrustes matches a grid search over O(2)") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Matrix x = gaussian_matrix(7, 2, RngStream(2, 2 * t));
    const Matrix u = gaussian_matrix(7, 2, RngStream(2, 2 * t + 1));
    const double d = orbit_distance(u, x);
    const double g = oracle::refined_orbit_distance(u, x);
    CHECK(std::abs(d - g) <= 1e-6 * x.norm());
    CHECK(d <= oracle::grid_orbit_distance(u, x) + 1e-12);
  }
}

TEST_CASE("aligned product is symmetric positive semidefinite") {
  const Matrix x = gaussian_matrix(9, 3, RngStream(3, 0));
  const Matrix u = gaussian_matrix(9, 3, RngStream(3, 1));
  const Alignment al = procrustes_align(u, x);
  CHECK((al.o_star.transpose() * al.o_star - Matrix::Identity(3, 3)).norm() < 1e-12);
  const Matrix p = u.transpose() * x * al.o_star;
  CHECK((p - p.transpose()).norm() < 1e-10);
  const auto [lam, vec] = oracle::jacobi_eigen(0.5 * (p + p.transpose()));
  CHECK(lam.minCoeff() >= -1e-10);
  CHECK(al.distance == doctest::Approx((x * al.o_star - u).norm()));
}

TEST_CASE("orbit distance is bi-invariant") {
  const Matrix x = gaussian_matrix(8, 2, RngStream(4, 0));
  const Matrix u = gaussian_matrix(8, 2, RngStream(4, 1));
  const Matrix q = random_orthogonal(8, RngStream(4, 2));
  const Matrix o1 = random_orthogonal(2, RngStream(4, 3));
  const Matrix o2 = random_orthogonal(2, RngStream(4, 4));
  const double d = orbit_distance(u, x);
  CHECK(orbit_distance(u * o1, x) == doctest::Approx(d).epsilon(1e-12));
  CHECK(orbit_distance(u, x * o2) == doctest::Approx(d).epsilon(1e-12));
  CHECK(orbit_distance(q * u, q * x) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("metrics error paths") {
  CHECK_THROWS_AS(relative_error(Matrix::Ones(3, 1), Matrix::Zero(3, 1)), Error);
  CHECK(orbit_distance(Matrix::Ones(3, 1), Matrix::Zero(3, 1)) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(orbit_distance(Matrix::Ones(3, 1), Matrix::Ones(4, 1)), Error);
}
