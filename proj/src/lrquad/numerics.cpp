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

#include "lrquad/numerics.hpp"

#include <cmath>
#include <sstream>

#include "lrquad/error.hpp"

namespace lrquad {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

std::mt19937_64 RngStream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed_),
                    static_cast<std::uint32_t>(master_seed_ >> 32),
                    static_cast<std::uint32_t>(stream_id_),
                    static_cast<std::uint32_t>(stream_id_ >> 32)};
  return std::mt19937_64(seq);
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, const RngStream& stream) {
  require(rows >= 1 && cols >= 1, Errc::invalid_argument, "gaussian_matrix: rows and cols must be >= 1");
  auto gen = stream.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(gen);
  return out;
}

Vector gaussian_vector(Eigen::Index size, const RngStream& stream) {
  return gaussian_matrix(size, 1, stream).col(0);
}

Matrix random_orthogonal(Eigen::Index size, const RngStream& stream) {
  const Matrix g = gaussian_matrix(size, size, stream);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < size; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

bool all_finite(const Matrix& m) noexcept { return m.allFinite(); }

EigenPairs sym_top_eigs(const Matrix& s, Eigen::Index k, double tol) {
  require(s.rows() == s.cols(), Errc::dimension_mismatch, "sym_top_eigs: matrix must be square");
  const Eigen::Index n = s.rows();
  require(k >= 1 && k <= n, Errc::invalid_argument, "sym_top_eigs: need 1 <= k <= n");
  require(tol > 0, Errc::invalid_argument, "sym_top_eigs: tol must be positive");
  require(s.allFinite(), Errc::non_finite, "sym_top_eigs: non-finite entries");

  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 64 * std::numeric_limits<double>::epsilon() * scale) {
    std::ostringstream os;
    os << "sym_top_eigs: matrix is not symmetric (max |S - S^T| = " << asym << ")";
    fail(Errc::not_symmetric, os.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  require(solver.info() == Eigen::Success, Errc::not_converged, "sym_top_eigs: eigensolver did not converge");

  // Eigen returns ascending order.
  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }

  const double limit = tol * s.norm();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double resid = (s * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
    if (resid > limit) {
      std::ostringstream os;
      os << "sym_top_eigs: residual " << resid << " of pair " << i << " exceeds " << limit;
      fail(Errc::not_converged, os.str());
    }
  }
  return out;
}

SvdTriplet small_svd(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, Errc::dimension_mismatch, "small_svd: matrix must be square");
  require(m.allFinite(), Errc::non_finite, "small_svd: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdTriplet{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace lrquad
