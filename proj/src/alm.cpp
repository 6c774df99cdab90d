#include "almlab/alm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace almlab {

namespace {

double portable_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

InnerResult inner_solve(const ModelProblem& problem, const Vector& lambda, double beta,
                        const Vector& warm_start, double tol_grad, int max_iter) {
  if (!(tol_grad > 0.0)) throw InvalidInputError("inner_solve: tol_grad must be positive");
  if (!(beta > 0.0)) throw InvalidInputError("inner_solve: beta must be positive");
  const LinearOperator& s = problem.S;
  const QuadraticObjective& obj = problem.objective;
  if (lambda.size() != s.rows()) throw DimensionError("inner_solve: lambda dimension");
  if (warm_start.size() != s.cols()) throw DimensionError("inner_solve: warm start dimension");

  // Singleton K: the reduced problem is the linear system
  // (Q + beta S*S) u = b + S*(beta zhat - lambda).
  if (auto zhat = problem.K.singleton_point()) {
    if (obj.dense_curvature()) {
      Matrix a = s.gram();
      const Matrix& q = *obj.dense_curvature();
      for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) a(i, j) = q(i, j) + beta * a(i, j);
      Vector rhs = scaled(*zhat, beta);
      axpy(-1.0, lambda, rhs);
      rhs = s.apply_adjoint(rhs);
      axpy(1.0, obj.linear_term(), rhs);
      InnerResult out;
      out.u = solve_spd(a, rhs);
      out.zeta = *zhat;
      out.iterations = 1;
      return out;
    }
  }

  // Moreau-reduced gradient descent with step 1 / L.
  const double lip = obj.curvature_upper() + beta * s.norm_bound_sq();
  Vector u = warm_start;
  const double inv_beta = 1.0 / beta;
  int it = 0;
  for (; it < max_iter; ++it) {
    Vector w = s.apply(u);
    axpy(inv_beta, lambda, w);
    Vector p = problem.K.project(w, 1e-12);
    Vector grad = obj.gradient(u);
    axpy(beta, s.apply_adjoint(sub(w, p)), grad);
    if (norm(grad) <= tol_grad) break;
    axpy(-1.0 / lip, grad, u);
  }
  if (it >= max_iter)
    throw AlmError("inner solver exhausted max_iter before reaching tol_grad",
                   AlmTrace{});

  InnerResult out;
  Vector w = s.apply(u);
  axpy(inv_beta, lambda, w);
  out.zeta = problem.K.project(w, 1e-12);
  out.u = std::move(u);
  out.iterations = it;
  return out;
}

std::vector<Vector> default_probes(Index dim, std::uint64_t seed) {
  std::vector<Vector> probes;
  if (dim <= 16) {
    for (Index i = 0; i < dim; ++i) probes.push_back(unit(dim, i));
    return probes;
  }
  std::mt19937_64 rng(seed ^ 0x70b35ull);
  for (int j = 0; j < 8; ++j) {
    Vector v(dim);
    double n = 0.0;
    do {
      for (auto& x : v) x = portable_u01(rng) - 0.5;
      n = norm(v);
    } while (n < 1e-12);
    probes.push_back(scaled(v, 1.0 / n));
  }
  return probes;
}

std::pair<Solution, AlmTrace> alm_solve(const ModelProblem& problem,
                                        const AlmConfig& cfg,
                                        std::vector<Vector> probes) {
  if (!(cfg.beta > 0.0)) throw InvalidInputError("alm_solve: beta must be positive");
  if (!(cfg.tol_primal > 0.0) || !(cfg.tol_step > 0.0) ||
      !(cfg.inner.tol_grad_abs > 0.0))
    throw InvalidInputError("alm_solve: tolerances must be positive");

  const LinearOperator& s = problem.S;
  if (probes.empty()) probes = default_probes(s.cols());
  for (const auto& v : probes)
    if (v.size() != s.cols()) throw DimensionError("alm_solve: probe dimension mismatch");

  AlmTrace trace;
  trace.probes = probes;
  trace.beta = cfg.beta;
  trace.lambda0 = cfg.lambda0 ? *cfg.lambda0 : zeros(s.rows());
  if (trace.lambda0.size() != s.rows())
    throw DimensionError("alm_solve: lambda0 dimension mismatch");

  const double c0 = problem.objective.strong_convexity();
  Vector lambda = trace.lambda0;
  Vector u = problem.feasible_witness ? *problem.feasible_witness : zeros(s.cols());

  Solution sol;
  int stall_count = 0;
  // Tightening below the rounding floor of the gradient evaluation would
  // livelock the inner loop; the floor tracks the data scale.
  const double tol_floor =
      1e-14 * (1.0 + norm(problem.objective.linear_term()));
  for (int k = 1; k <= cfg.max_outer; ++k) {
    const double tol_k = std::max(
        cfg.inner.tol_grad_abs /
            std::pow(static_cast<double>(k), cfg.inner.tighten_exponent),
        tol_floor);
    InnerResult inner;
    try {
      inner = inner_solve(problem, lambda, cfg.beta, u, tol_k, cfg.inner.max_iter);
    } catch (const AlmError&) {
      throw AlmError("alm_solve: inner solver did not converge at outer step " +
                         std::to_string(k),
                     std::move(trace));
    }

    const Vector r = sub(s.apply(inner.u), inner.zeta);
    axpy(cfg.beta, r, lambda);  // lambda^{k+1} = lambda^k + beta r^{k+1}
    const double step = norm(sub(inner.u, u));
    u = inner.u;

    AlmRecord rec;
    rec.k = k;
    rec.u = inner.u;
    rec.zeta = inner.zeta;
    rec.lambda = lambda;
    rec.r_norm = norm(r);
    rec.objective = problem.objective.value(inner.u);
    rec.lambda_norm = norm(lambda);
    rec.inner_iterations = inner.iterations;
    rec.probe_values.reserve(probes.size());
    for (const auto& v : probes) rec.probe_values.push_back(dot(lambda, s.apply(v)));
    if (!trace.records.empty()) {
      const AlmRecord& prev = trace.records.back();
      const Vector r_prev = sub(s.apply(prev.u), prev.zeta);
      rec.fejer_slack = norm_sq(r) - norm_sq(r_prev) + norm_sq(sub(r, r_prev)) +
                        (2.0 * c0 / cfg.beta) * norm_sq(sub(rec.u, prev.u));
    }
    trace.records.push_back(std::move(rec));

    if (trace.records.back().r_norm <= cfg.tol_primal && step <= cfg.tol_step) {
      sol.converged = true;
      sol.termination_reason = "primal residual and step below tolerance";
      break;
    }
    // Heuristic infeasibility detection: the primal residual is stuck at a
    // visibly infeasible level while the iterates have stopped moving.
    if (trace.records.back().r_norm > std::max(cfg.tol_primal, 1e-8) &&
        step <= cfg.tol_step) {
      if (++stall_count >= 50) {
        throw AlmError("alm_solve: feasibility suspect (residual stalled for 50 "
                       "outer iterations with vanishing steps)",
                       std::move(trace));
      }
    } else {
      stall_count = 0;
    }
  }

  const AlmRecord& last = trace.records.back();
  sol.u_final = last.u;
  sol.zeta_final = last.zeta;
  sol.lambda_final = last.lambda;
  if (!sol.converged) sol.termination_reason = "max_outer reached";
  return {sol, trace};
}

MonitorReport convergence_monitors(const AlmTrace& trace, double c0, double beta,
                                   double slack) {
  MonitorReport report;
  const auto& recs = trace.records;
  if (recs.size() < 2) return report;

  double sum = 0.0;
  // Recover r^k = beta^{-1} (lambda^k - lambda^{k-1}) through the update
  // identity rather than trusting the recorded norms.
  std::vector<Vector> residuals;
  residuals.reserve(recs.size());
  const Vector* prev_lambda = &trace.lambda0;
  for (const auto& rec : recs) {
    residuals.push_back(scaled(sub(rec.lambda, *prev_lambda), 1.0 / beta));
    prev_lambda = &rec.lambda;
  }

  for (std::size_t i = 0; i < recs.size(); ++i) {
    sum += norm_sq(residuals[i]);
    report.residual_partial_sums.push_back(sum);
    if (i == 0) continue;
    const double s = norm_sq(residuals[i]) - norm_sq(residuals[i - 1]) +
                     norm_sq(sub(residuals[i], residuals[i - 1])) +
                     (2.0 * c0 / beta) * norm_sq(sub(recs[i].u, recs[i - 1].u));
    report.fejer_slacks.push_back(s);
    report.max_fejer_slack = std::max(report.max_fejer_slack, s);
  }
  report.fejer_ok = report.max_fejer_slack <= slack;
  const std::size_t tail_start = recs.size() - recs.size() / 4 - 1;
  report.tail_increment =
      report.residual_partial_sums.back() - report.residual_partial_sums[tail_start];
  return report;
}

BregmanReport bregman_monitor(const AlmTrace& trace, const ModelProblem& problem,
                              const Vector& u_ref, const Vector& zeta_ref,
                              double slack) {
  if (!problem.K.contains(zeta_ref, 1e-8))
    throw FeasibilityError("bregman_monitor: reference zeta not in K");
  if (norm(sub(problem.S.apply(u_ref), zeta_ref)) > 1e-9)
    throw FeasibilityError("bregman_monitor: reference pair violates S u = zeta");

  BregmanReport report;
  const auto& recs = trace.records;
  if (recs.empty()) return report;
  const double theta_ref = problem.objective.value(u_ref);

  // D_k = theta(ref) - theta(u^k) - <Dtheta(u^k), ref - u^k> - <lambda^k, zeta_ref - zeta^k>
  for (const auto& rec : recs) {
    const double d = theta_ref - rec.objective -
                     dot(problem.objective.gradient(rec.u), sub(u_ref, rec.u)) -
                     dot(rec.lambda, sub(zeta_ref, rec.zeta));
    report.distances.push_back(d);
  }
  report.min_distance =
      *std::min_element(report.distances.begin(), report.distances.end());
  report.nonnegative_ok = report.min_distance >= -slack;

  // Telescoping: D-step_k + beta |r^{k+1}|^2 = D_k - D_{k+1}, where D-step_k
  // is the Bregman increment between consecutive iterates.
  double max_gap = 0.0;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    const AlmRecord& a = recs[i];
    const AlmRecord& b = recs[i + 1];
    const Vector r_next = scaled(sub(b.lambda, a.lambda), 1.0 / trace.beta);
    const double step = b.objective - a.objective -
                        dot(problem.objective.gradient(a.u), sub(b.u, a.u)) -
                        dot(a.lambda, sub(b.zeta, a.zeta));
    const double lhs = step + trace.beta * norm_sq(r_next);
    const double rhs = report.distances[i] - report.distances[i + 1];
    max_gap = std::max(max_gap, std::abs(lhs - rhs));
  }
  report.max_telescoping_gap = max_gap;
  report.telescoping_ok = max_gap <= slack;
  return report;
}

WakktReport wakkt_residuals(const ModelProblem& problem, const AlmTrace& trace,
                            const std::vector<Vector>& test_dirs,
                            const SamplePlan& k_samples,
                            const std::vector<double>& t_grid) {
  WakktReport report;
  if (trace.records.empty()) return report;
  const Vector& u_final = trace.records.back().u;
  const Vector grad_final = problem.objective.gradient(u_final);
  const Vector su_final = problem.S.apply(u_final);
  report.zeta_samples = sample_points(problem.K, k_samples);

  std::vector<Vector> s_dirs;
  std::vector<double> grad_terms;
  for (const auto& v : test_dirs) {
    s_dirs.push_back(problem.S.apply(v));
    grad_terms.push_back(dot(grad_final, v));
  }

  for (const auto& rec : trace.records) {
    std::vector<double> station;
    station.reserve(test_dirs.size());
    for (std::size_t j = 0; j < test_dirs.size(); ++j)
      station.push_back(grad_terms[j] + dot(rec.lambda, s_dirs[j]));

    double comp_max = -std::numeric_limits<double>::infinity();
    for (const auto& zeta : report.zeta_samples)
      comp_max = std::max(comp_max, dot(rec.lambda, sub(zeta, su_final)));

    double combined = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < test_dirs.size(); ++j) {
      for (const auto& zeta : report.zeta_samples) {
        const double pair_term = dot(rec.lambda, sub(zeta, su_final));
        for (double t : t_grid) {
          combined = std::max(combined, station[j] + t * pair_term);
        }
      }
    }
    report.stationarity.push_back(std::move(station));
    report.complementarity_max.push_back(comp_max);
    report.combined_max.push_back(combined);
  }
  return report;
}

}  // namespace almlab
