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

/// Best right-orthogonal alignment of X to U. O* = W V^T from the SVD
/// X^T U = W D V^T; when X^T U is rank deficient O* is not unique but the
/// distance is.
struct Alignment {
  Matrix o_star;
  double distance = 0.0;        // |X O* - U|_F = d(U)
  double relative_error = 0.0;  // distance / |X|_F
};

Alignment procrustes_align(const Matrix& u, const Matrix& x);

/// min over orthogonal O of |X O - U|_F / |X|_F.
double relative_error(const Matrix& u, const Matrix& x);

/// Orbit distance d(U) without the relative term; defined for X = 0 as well.
double orbit_distance(const Matrix& u, const Matrix& x);

}  // namespace lrquad
