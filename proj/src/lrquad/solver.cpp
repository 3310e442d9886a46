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

#include "lrquad/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lrquad/error.hpp"
#include "lrquad/metrics.hpp"

namespace lrquad {

std::string_view to_string(Variant v) noexcept {
  return v == Variant::exponential ? "exp" : "plain";
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::reached_tolerance: return "reached_tolerance";
    case Termination::stationary: return "stationary";
    case Termination::max_iters: return "max_iters";
    case Termination::diverged: return "diverged";
  }
  return "unknown";
}

namespace {

void check_dims(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y) {
  if (u.rows() != ensemble.n() || y.m() != ensemble.m()) {
    std::ostringstream os;
    os << "dimension mismatch: U is " << u.rows() << "x" << u.cols() << ", A is " << ensemble.m() << "x"
       << ensemble.n() << ", y has " << y.m() << " entries";
    fail(Errc::dimension_mismatch, os.str());
  }
}

double positive_sum(const MeasurementSet& y, const char* who) {
  const double total = y.y.sum();
  if (!(total > 0)) fail(Errc::degenerate_measurements, std::string(who) + ": sum of measurements is not positive");
  return total;
}

// One pass over the data: residuals r_i = |a_i^T U|^2 - y_i, both objectives
// and the weighted gradient.
struct Evaluation {
  double objective;
  double weighted_objective;
  Matrix gradient;
};

Evaluation evaluate(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y, const Vector& w) {
  const double m = static_cast<double>(y.m());
  const Matrix au = ensemble.a * u;
  const Vector resid = au.rowwise().squaredNorm() - y.y;
  const Vector weighted = w.cwiseProduct(resid);
  Evaluation out;
  out.objective = resid.squaredNorm() / (4 * m);
  out.weighted_objective = weighted.dot(resid) / (4 * m);
  out.gradient = ensemble.a.transpose() * ((weighted / m).asDiagonal() * au);
  return out;
}

}  // namespace

Vector exp_weights(const MeasurementSet& y, double alpha) {
  require(alpha > 0, Errc::invalid_argument, "exp_weights: alpha must be positive");
  const double total = positive_sum(y, "exp_weights");
  const double scale = static_cast<double>(y.m()) / (alpha * total);
  return (-scale * y.y.array()).exp().matrix();
}

Matrix exp_gradient(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y, const Vector& w) {
  check_dims(u, ensemble, y);
  require(w.size() == y.m(), Errc::dimension_mismatch, "exp_gradient: weight vector length differs from m");
  return evaluate(u, ensemble, y, w).gradient;
}

Matrix plain_gradient(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y) {
  check_dims(u, ensemble, y);
  return evaluate(u, ensemble, y, Vector::Ones(y.m())).gradient;
}

double objective(const Matrix& u, const SensingEnsemble& ensemble, const MeasurementSet& y, const Vector* w) {
  check_dims(u, ensemble, y);
  const double m = static_cast<double>(y.m());
  const Vector resid = (ensemble.a * u).rowwise().squaredNorm() - y.y;
  if (w == nullptr) return resid.squaredNorm() / (4 * m);
  require(w->size() == y.m(), Errc::dimension_mismatch, "objective: weight vector length differs from m");
  return w->cwiseProduct(resid).dot(resid) / (4 * m);
}

double step_size(const StepRule& rule, const MeasurementSet& y, const Vector* spectrum, double alpha) {
  switch (rule.kind) {
    case StepRule::Kind::empirical: {
      require(rule.c > 0, Errc::invalid_argument, "step_size: c must be positive");
      const double total = positive_sum(y, "step_size");
      return rule.c * static_cast<double>(y.m()) / total;
    }
    case StepRule::Kind::theory: {
      require(spectrum != nullptr && spectrum->size() >= 1, Errc::invalid_argument,
              "step_size: the theory rule needs the target spectrum");
      const double c2 = rule.c2 > 0 ? rule.c2 : 125.0 * alpha * alpha;
      const double s1 = (*spectrum)(0);
      const double sr = (*spectrum)(spectrum->size() - 1);
      const double fro_sq = spectrum->sum();
      return sr * sr * sr / (c2 * s1 * fro_sq * fro_sq * fro_sq);
    }
    case StepRule::Kind::fixed:
      require(rule.mu > 0, Errc::invalid_argument, "step_size: fixed mu must be positive");
      return rule.mu;
  }
  fail(Errc::invalid_argument, "step_size: unknown rule");
}

void validate(const SolverConfig& cfg) {
  require(cfg.alpha > 0, Errc::invalid_argument, "solver: alpha must be positive");
  require(cfg.max_iters >= 1, Errc::invalid_argument, "solver: max_iters must be >= 1");
  require(cfg.success_tol > 0, Errc::invalid_argument, "solver: success_tol must be positive");
  require(!cfg.grad_tol || *cfg.grad_tol > 0, Errc::invalid_argument, "solver: grad_tol must be positive");
}

RunTrace run(const SensingEnsemble& ensemble, const MeasurementSet& y, const Matrix& u0, const SolverConfig& cfg,
             const TargetMatrix* target) {
  validate(cfg);
  check_dims(u0, ensemble, y);
  if (target != nullptr)
    require(target->n() == u0.rows() && target->r() == u0.cols(), Errc::dimension_mismatch,
            "run: target shape differs from U0");
  require(u0.allFinite(), Errc::non_finite, "run: U0 has non-finite entries");

  // Weights depend on y only, never on the iterate.
  const Vector w = cfg.variant == Variant::exponential ? exp_weights(y, cfg.alpha) : Vector::Ones(y.m());

  RunTrace trace;
  trace.step_size = step_size(cfg.step, y, target ? &target->spectrum() : nullptr, cfg.alpha);
  const double mu = trace.step_size;
  const double blowup = 1e6 * u0.norm();

  Matrix u = u0;
  double grad_tol = 0.0;
  trace.records.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);

  for (int k = 0;; ++k) {
    Evaluation ev = evaluate(u, ensemble, y, w);
    TraceRecord rec;
    rec.iteration = k;
    rec.objective = ev.objective;
    rec.weighted_objective = ev.weighted_objective;
    rec.grad_norm = ev.gradient.norm();
    rec.relative_error =
        target ? relative_error(u, target->x()) : std::numeric_limits<double>::quiet_NaN();
    if (k == 0) grad_tol = cfg.grad_tol.value_or(1e-10 * std::max(1.0, ev.weighted_objective));
    trace.records.push_back(rec);
    if (cfg.keep_iterates) trace.iterates.push_back(u);

    if (target != nullptr && rec.relative_error < cfg.success_tol) {
      trace.converged = true;
      trace.termination = Termination::reached_tolerance;
      break;
    }
    if (target == nullptr && rec.grad_norm < grad_tol) {
      trace.converged = true;
      trace.termination = Termination::stationary;
      break;
    }
    if (k == cfg.max_iters) {
      trace.termination = Termination::max_iters;
      break;
    }

    u -= mu * ev.gradient;
    trace.iterations = k + 1;
    if (!u.allFinite() || u.norm() > blowup) {
      trace.termination = Termination::diverged;
      break;
    }
  }
  trace.u = std::move(u);
  return trace;
}

}  // namespace lrquad
