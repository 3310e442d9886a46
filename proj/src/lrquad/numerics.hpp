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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace lrquad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// 64-bit finalizer from SplitMix64.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

/// Names a reproducible random sequence. The stream is a value: every consumer
/// that calls engine() on the same (master_seed, stream_id) sees the same draws,
/// so independent consumers within one job must derive distinct children.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  RngStream child(std::uint64_t tag) const noexcept {
    return RngStream(master_seed_, hash_combine(stream_id_, tag));
  }

  std::mt19937_64 engine() const;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

/// rows x cols iid N(0,1), filled in row-major order.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, const RngStream& stream);
Vector gaussian_vector(Eigen::Index size, const RngStream& stream);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(Eigen::Index size, const RngStream& stream);

bool all_finite(const Matrix& m) noexcept;

struct EigenPairs {
  Vector values;   // non-increasing
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

/// The k algebraically largest eigenpairs of a symmetric matrix. Throws
/// not_symmetric when max|S - S^T| exceeds machine-level tolerance and
/// not_converged when any residual |S v - lambda v| exceeds tol * |S|_F.
EigenPairs sym_top_eigs(const Matrix& s, Eigen::Index k, double tol = 1e-10);

struct SvdTriplet {
  Matrix w;  // left singular vectors
  Vector d;  // non-negative, descending
  Matrix v;  // right singular vectors
};

/// Full SVD of a small square matrix: M = W diag(D) V^T.
SvdTriplet small_svd(const Matrix& m);

}  // namespace lrquad
