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

#include "lrquad/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrquad/error.hpp"
#include "lrquad/initializer.hpp"
#include "lrquad/metrics.hpp"

namespace lrquad {

double ProbeReport::observed_value(const std::string& key) const {
  for (const auto& [k, v] : observed)
    if (k == key) return v;
  fail(Errc::invalid_argument, "probe " + name + " has no observed value '" + key + "'");
}

namespace {

ProbeReport make_report(std::string name, const RngStream& stream) {
  ProbeReport rep;
  rep.name = std::move(name);
  rep.master_seed = stream.master_seed();
  rep.stream_id = stream.stream_id();
  return rep;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// (1/m) sum_i a_i^T M a_i over m fresh Gaussian rows.
double quadratic_form_mean(const Matrix& mat, Eigen::Index m, const RngStream& stream) {
  const Matrix a = gaussian_matrix(m, mat.rows(), stream);
  return (a * mat).cwiseProduct(a).sum() / static_cast<double>(m);
}

double nuclear_norm(const Matrix& mat) {
  Eigen::BDCSVD<Matrix> svd(mat);
  return svd.singularValues().sum();
}

Eigen::Index concentration_sample_count(Eigen::Index n, double delta) {
  return static_cast<Eigen::Index>(std::ceil(16.0 * static_cast<double>(n) / (delta * delta)));
}

void check_concentration_args(const Matrix& mat, double delta) {
  require(mat.rows() == mat.cols() && mat.rows() >= 1, Errc::dimension_mismatch,
          "concentration_probe: M must be square");
  require(delta > 0 && delta < 1, Errc::invalid_argument, "concentration_probe: need 0 < delta < 1");
}

}  // namespace

ProbeReport concentration_probe(const Matrix& mat, double delta, const RngStream& stream) {
  check_concentration_args(mat, delta);
  const double asym = (mat - mat.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
  require(asym <= 1e-10 * scale, Errc::invalid_argument, "concentration_probe: M is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(mat, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-10 * scale, Errc::invalid_argument,
          "concentration_probe: M is not positive semidefinite");

  const Eigen::Index n = mat.rows();
  const Eigen::Index m = concentration_sample_count(n, delta);
  const double nuclear = nuclear_norm(mat);
  require(nuclear > 0, Errc::invalid_argument, "concentration_probe: M is zero");
  const double mean = quadratic_form_mean(mat, m, stream);
  const double ratio = mean / nuclear;

  ProbeReport rep = make_report("concentration", stream);
  rep.parameters = {{"n", double(n)}, {"delta", delta}, {"m", double(m)}};
  rep.observed = {{"ratio", ratio}, {"sample_mean", mean}, {"nuclear_norm", nuclear}};
  rep.bounds = {{"lower", 1 - delta}, {"upper", 1 + delta}};
  rep.asserted = true;
  rep.passed = ratio >= 1 - delta && ratio <= 1 + delta;
  return rep;
}

ProbeReport concentration_upper_probe(const Matrix& mat, double delta, const RngStream& stream) {
  check_concentration_args(mat, delta);
  const Eigen::Index n = mat.rows();
  const Eigen::Index m = concentration_sample_count(n, delta);
  const double nuclear = nuclear_norm(mat);
  require(nuclear > 0, Errc::invalid_argument, "concentration_probe: M is zero");
  const double mean = quadratic_form_mean(mat, m, stream);
  const double ratio = mean / nuclear;

  ProbeReport rep = make_report("concentration_upper", stream);
  rep.parameters = {{"n", double(n)}, {"delta", delta}, {"m", double(m)}};
  rep.observed = {{"ratio", ratio}, {"sample_mean", mean}, {"nuclear_norm", nuclear}};
  rep.bounds = {{"upper", 1 + delta}};
  rep.asserted = true;
  rep.passed = ratio <= 1 + delta;
  return rep;
}

double second_moment_closed_form(const Matrix& x, const Matrix& h) {
  require(x.rows() == h.rows() && x.cols() == h.cols(), Errc::dimension_mismatch,
          "second_moment_closed_form: X and H shapes differ");
  const Matrix xth = x.transpose() * h;  // (s, k) entry is x_s^T h_k
  double diag_term = 0.0;
  for (Eigen::Index s = 0; s < x.cols(); ++s) diag_term += x.col(s).squaredNorm() * h.col(s).squaredNorm();
  const double trace = xth.trace();
  return diag_term + trace * trace + (xth * xth).trace();
}

ProbeReport expectation_identity_probe(const Matrix& x, const Matrix& h, std::int64_t samples,
                                       const RngStream& stream) {
  require(x.rows() == h.rows() && x.cols() == h.cols(), Errc::dimension_mismatch,
          "expectation_identity_probe: X and H shapes differ");
  require(samples >= 10000, Errc::invalid_argument, "expectation_identity_probe: need at least 1e4 samples");
  const Matrix gram = x.transpose() * x;
  const double gram_scale = std::max(1e-300, gram.diagonal().maxCoeff());
  Matrix off = gram;
  off.diagonal().setZero();
  require(gram.diagonal().minCoeff() > 0 && off.cwiseAbs().maxCoeff() <= 1e-10 * gram_scale,
          Errc::invalid_argument, "expectation_identity_probe: X must have nonzero orthogonal columns");

  // Align U = X + H to the orbit and rotate back so H^T X is symmetric.
  const Matrix u = x + h;
  const Matrix o_star = procrustes_align(u, x).o_star;
  const Matrix h_aligned = u * o_star.transpose() - x;

  const Vector sigma = gram.diagonal();
  const double sigma_1 = sigma.maxCoeff();
  const double sigma_r = sigma.minCoeff();
  const Matrix htx = h_aligned.transpose() * x;
  const double h_sq = h_aligned.squaredNorm();
  const double tr = htx.trace();
  const double common = tr * tr + htx.squaredNorm();
  const double lower = sigma_r * h_sq + common;
  const double upper = sigma_1 * h_sq + common;
  const double closed = second_moment_closed_form(x, h_aligned);

  constexpr std::int64_t block = 10000;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t done = 0;
  for (std::uint64_t b = 0; done < samples; ++b) {
    const std::int64_t rows = std::min(block, samples - done);
    const Matrix a = gaussian_matrix(rows, x.rows(), stream.child(b));
    const Vector v = (a * h_aligned).cwiseProduct(a * x).rowwise().sum();
    const Vector v2 = v.cwiseProduct(v);
    sum += v2.sum();
    sum_sq += v2.squaredNorm();
    done += rows;
  }
  const double count = static_cast<double>(samples);
  const double mc_mean = sum / count;
  const double variance = std::max(0.0, sum_sq / count - mc_mean * mc_mean);
  const double std_error = std::sqrt(variance / count);
  const double rel_dev = closed > 0 ? std::abs(mc_mean - closed) / closed : std::abs(mc_mean);

  const double slack = 1e-12 * std::max(1.0, upper);
  const bool bracketed = closed >= lower - slack && closed <= upper + slack;

  ProbeReport rep = make_report("expectation_identity", stream);
  rep.parameters = {{"n", double(x.rows())}, {"r", double(x.cols())}, {"samples", count}};
  rep.observed = {{"monte_carlo", mc_mean},
                  {"std_error", std_error},
                  {"closed_form", closed},
                  {"relative_deviation", rel_dev},
                  {"htx_asymmetry", (htx - htx.transpose()).cwiseAbs().maxCoeff()},
                  {"bracketed", bracketed ? 1.0 : 0.0}};
  rep.bounds = {{"lower", lower}, {"upper", upper}, {"relative_tolerance", 0.02}};
  rep.asserted = true;
  rep.passed = bracketed && rel_dev <= 0.02;
  return rep;
}

double regularity_margin(const SensingEnsemble& ensemble, const MeasurementSet& y, const TargetMatrix& x,
                         const Matrix& u, double alpha) {
  const Matrix x_bar = x.x() * procrustes_align(u, x.x()).o_star;
  const Matrix h = u - x_bar;
  const Vector w = exp_weights(y, alpha);
  const Matrix grad = exp_gradient(u, ensemble, y, w);
  const double fro_sq = x.frobenius_sq();
  const double s1 = x.sigma_max();
  const double sr = x.sigma_min();
  const double lambda = 250.0 * alpha * alpha * s1 * fro_sq * fro_sq / (sr * sr * sr);
  return (grad.array() * h.array()).sum() - sr / 7.0 * h.squaredNorm() - grad.squaredNorm() / (lambda * fro_sq);
}

ProbeReport regularity_probe(const SensingEnsemble& ensemble, const MeasurementSet& y, const TargetMatrix& x,
                             double alpha, int count, const RngStream& stream, bool assert_margin) {
  require(count >= 1, Errc::invalid_argument, "regularity_probe: need at least one sample");
  require(y.noiseless, Errc::invalid_argument, "regularity_probe: measurements must be noiseless");
  require(y.y.sum() > 0, Errc::degenerate_measurements, "regularity_probe: sum of measurements is not positive");

  // The constants are stated for |X|_F = 1; scale X and y consistently.
  const double scale = 1.0 / x.x().norm();
  const TargetMatrix xn(scale * x.x());
  MeasurementSet yn = y;
  yn.y *= scale * scale;

  const Eigen::Index n = xn.n();
  const Eigen::Index r = xn.r();
  const double radius = std::sqrt(xn.sigma_min() / 8.0);
  std::vector<double> margins;
  margins.reserve(static_cast<std::size_t>(count));
  double min_normalized = std::numeric_limits<double>::infinity();
  for (int j = 0; j < count; ++j) {
    const RngStream sample = stream.child(static_cast<std::uint64_t>(j));
    const Matrix o = random_orthogonal(r, sample.child(0));
    Matrix dir = gaussian_matrix(n, r, sample.child(1));
    dir /= dir.norm();
    auto gen = sample.child(2).engine();
    const double frac = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(gen);  // (0, 1]
    const Matrix u = xn.x() * o + (frac * radius) * dir;
    const double margin = regularity_margin(ensemble, yn, xn, u, alpha);
    margins.push_back(margin);
    const double h_sq = std::pow(orbit_distance(u, xn.x()), 2);
    if (h_sq > 0) min_normalized = std::min(min_normalized, margin / h_sq);
  }
  const double min_margin = *std::min_element(margins.begin(), margins.end());
  const auto nonneg = std::count_if(margins.begin(), margins.end(), [](double v) { return v >= 0; });

  ProbeReport rep = make_report("regularity", stream);
  rep.parameters = {{"n", double(n)}, {"r", double(r)}, {"m", double(ensemble.m())}, {"alpha", alpha},
                    {"samples", double(count)}, {"radius", radius}};
  rep.observed = {{"min_margin", min_margin},
                  {"fraction_nonnegative", double(nonneg) / count},
                  {"min_margin_over_h_sq", min_normalized}};
  rep.bounds = {{"nu", 7.0},
                {"lambda", 250.0 * alpha * alpha * xn.sigma_max() / std::pow(xn.sigma_min(), 3)},
                {"margin_floor", 0.0}};
  rep.series = std::move(margins);
  rep.asserted = assert_margin;
  rep.passed = !assert_margin || min_margin >= 0;
  return rep;
}

ProbeReport contraction_probe(const RunTrace& trace, const TargetMatrix& x, double mu) {
  require(!trace.records.empty(), Errc::invalid_argument, "contraction_probe: empty trace");
  for (const auto& rec : trace.records)
    require(std::isfinite(rec.relative_error), Errc::invalid_argument,
            "contraction_probe: trace was recorded without a target");
  const double x_norm = x.x().norm();
  const double radius = std::sqrt(x.sigma_min() / 8.0);
  const double rho0 = 2.0 * mu * x.sigma_min() / 7.0;
  const double bound = std::sqrt(std::max(0.0, 1.0 - rho0));

  std::vector<double> ratios;
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const double dk = trace.records[k].relative_error * x_norm;
    if (dk <= 0 || dk > radius) continue;
    ratios.push_back(trace.records[k + 1].relative_error * x_norm / dk);
  }
  const auto within_bound = std::count_if(ratios.begin(), ratios.end(), [&](double v) { return v <= bound; });
  const auto within_one = std::count_if(ratios.begin(), ratios.end(), [](double v) { return v <= 1.0; });
  const double total = static_cast<double>(ratios.size());

  ProbeReport rep;
  rep.name = "contraction";
  rep.parameters = {{"mu", mu}, {"iterations", double(trace.iterations)}, {"radius", radius}};
  rep.observed = {{"ratio_count", total},
                  {"max_ratio", ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : *std::max_element(ratios.begin(), ratios.end())},
                  {"fraction_within_bound", ratios.empty() ? 1.0 : double(within_bound) / total},
                  {"fraction_at_most_one", ratios.empty() ? 1.0 : double(within_one) / total}};
  rep.bounds = {{"rho0", rho0}, {"contraction_bound", bound}};
  rep.series = std::move(ratios);
  rep.asserted = false;
  return rep;
}

ProbeReport init_quality_probe(Eigen::Index n, Eigen::Index r, const std::vector<Eigen::Index>& m_list,
                               int trials, double alpha_y, const RngStream& stream) {
  require(trials >= 1, Errc::invalid_argument, "init_quality_probe: trials must be >= 1");
  require(!m_list.empty(), Errc::invalid_argument, "init_quality_probe: empty m grid");
  for (const auto m : m_list) {
    if (m < n) {
      std::ostringstream os;
      os << "init_quality_probe: m = " << m << " is below n = " << n;
      fail(Errc::invalid_argument, os.str());
    }
  }
  ProbeReport rep = make_report("init_quality", stream);
  rep.parameters = {{"n", double(n)}, {"r", double(r)}, {"trials", double(trials)}, {"alpha_y", alpha_y}};
  InitConfig cfg;
  cfg.alpha_y = alpha_y;
  bool monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < m_list.size(); ++g) {
    const Eigen::Index m = m_list[g];
    std::vector<double> ratios;
    int within = 0;
    for (int t = 0; t < trials; ++t) {
      const RngStream trial = stream.child(hash_combine(g, static_cast<std::uint64_t>(t)));
      const TargetMatrix x = random_target(n, r, trial.child(0));
      const SensingEnsemble a = gaussian_ensemble(m, n, trial.child(1));
      const InitResult init = spectral_init(a, measure(x, a), r, cfg);
      const double d = orbit_distance(init.u0, x.x());
      if (d <= std::sqrt(x.sigma_min() / 8.0)) ++within;
      ratios.push_back(d * d / x.sigma_min());
    }
    const double med = median(ratios);
    const std::string key = "m=" + std::to_string(m);
    rep.parameters.emplace_back("m_" + std::to_string(g), double(m));
    rep.observed.emplace_back(key + ".fraction_within", double(within) / trials);
    rep.observed.emplace_back(key + ".median_d2_over_sigma_r", med);
    rep.series.push_back(med);
    if (med > previous) monotone = false;
    previous = med;
  }
  rep.bounds = {{"d2_over_sigma_r_target", 0.125}};
  rep.asserted = true;
  rep.passed = monotone;
  return rep;
}

}  // namespace lrquad
