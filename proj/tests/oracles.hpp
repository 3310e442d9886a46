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

// Independent reference computations used only by the tests. Nothing here
// calls into the library's solver paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cyclic Jacobi sweeps on a symmetric matrix; returns eigenvalues in
/// descending order with matching eigenvector columns.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  Vector values(n);
  Matrix vectors(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values(i) = a(order[i], order[i]);
    vectors.col(i) = v.col(order[i]);
  }
  return {values, vectors};
}

/// Eigenvalues of a symmetric 2x2 [[a, b], [b, c]] by the quadratic formula, descending.
inline std::pair<double, double> sym2x2_eigenvalues(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  return {mean + radius, mean - radius};
}

struct Moments {
  double mean;
  double variance;  // unbiased
};

inline Moments sample_moments(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

/// Central finite-difference gradient of a scalar function of a matrix.
inline Matrix finite_difference(const std::function<double(const Matrix&)>& f, const Matrix& at, double h) {
  Matrix g(at.rows(), at.cols());
  Matrix probe = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = f(probe);
      probe(i, j) = saved - h;
      const double down = f(probe);
      probe(i, j) = saved;
      g(i, j) = (up - down) / (2 * h);
    }
  }
  return g;
}

/// Direct evaluation of (1/4m) sum w_i (y_i - |a_i^T U|^2)^2 one measurement at a time.
inline double weighted_loss(const Matrix& u, const Matrix& a, const Vector& y, const Vector& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double q = 0.0;
    for (Eigen::Index s = 0; s < u.cols(); ++s) {
      double dot = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) dot += a(i, k) * u(k, s);
      q += dot * dot;
    }
    total += w(i) * (y(i) - q) * (y(i) - q);
  }
  return total / (4.0 * static_cast<double>(a.rows()));
}

/// min over O(r) of |X O - U|_F by brute force: r = 1 checks both signs, r = 2
/// scans `steps` rotation angles and their reflections.
inline double grid_orbit_distance(const Matrix& u, const Matrix& x, int steps = 720) {
  if (x.cols() == 1) return std::min((x - u).norm(), (x + u).norm());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    const double th = 2.0 * std::numbers::pi * k / steps;
    Eigen::Matrix2d rot, refl;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    refl << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
    best = std::min(best, (x * rot - u).norm());
    best = std::min(best, (x * refl - u).norm());
  }
  return best;
}

/// Golden-section refinement of the grid minimum over each branch of O(2).
inline double refined_orbit_distance(const Matrix& u, const Matrix& x, int steps = 720) {
  if (x.cols() == 1) return grid_orbit_distance(u, x);
  auto branch = [&](bool reflect, double th) {
    Eigen::Matrix2d o;
    if (reflect)
      o << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
    else
      o << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return (x * o - u).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  const double step = 2.0 * std::numbers::pi / steps;
  for (bool reflect : {false, true}) {
    int arg = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (int k = 0; k < steps; ++k) {
      const double v = branch(reflect, step * k);
      if (v < bv) bv = v, arg = k;
    }
    double lo = step * (arg - 1), hi = step * (arg + 1);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
      if (branch(reflect, a) < branch(reflect, b)) hi = b; else lo = a;
    }
    best = std::min({best, bv, branch(reflect, 0.5 * (lo + hi))});
  }
  return best;
}

}  // namespace oracle
