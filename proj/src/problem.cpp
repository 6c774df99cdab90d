#include "almlab/problem.hpp"

#include <cmath>
#include <random>

namespace almlab {

namespace {

double portable_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

QuadraticObjective::QuadraticObjective(Matrix q, Vector b, double c) {
  if (q.rows() != q.cols()) throw DimensionError("objective: Q not square");
  if (q.rows() != b.size()) throw DimensionError("objective: Q/b dimension mismatch");
  if (!q.is_symmetric(1e-12))
    throw InvalidInputError("objective: Q not symmetric within 1e-12");
  // Positive definiteness; Cholesky succeeds iff lambda_min(Q) > 0.
  CholeskyFactor check(q);
  (void)check;
  dim_ = q.rows();
  q_ = std::move(q);
  b_ = std::move(b);
  c_ = c;
}

QuadraticObjective QuadraticObjective::implicit(
    std::function<Vector(const Vector&)> apply_q, Index dim, Vector b, double c,
    double curvature_lower, double curvature_upper) {
  if (b.size() != dim) throw DimensionError("objective: b dimension mismatch");
  if (!(curvature_lower > 0.0))
    throw InvalidInputError("objective: curvature lower bound must be positive");
  QuadraticObjective obj;
  obj.dim_ = dim;
  obj.apply_q_ = std::move(apply_q);
  obj.b_ = std::move(b);
  obj.c_ = c;
  obj.cache_->c0 = curvature_lower;
  obj.cache_->lmax = curvature_upper;
  return obj;
}

Vector QuadraticObjective::apply_curvature(const Vector& u) const {
  if (u.size() != dim_) throw DimensionError("objective: u dimension mismatch");
  return q_ ? q_->apply(u) : apply_q_(u);
}

double QuadraticObjective::value(const Vector& u) const {
  return 0.5 * dot(u, apply_curvature(u)) - dot(b_, u) + c_;
}

Vector QuadraticObjective::gradient(const Vector& u) const {
  Vector g = apply_curvature(u);
  axpy(-1.0, b_, g);
  return g;
}

double QuadraticObjective::strong_convexity() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->c0 < 0.0) cache_->c0 = jacobi_eigen(*q_).values.front();
  return cache_->c0;
}

double QuadraticObjective::curvature_upper() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (cache_->lmax < 0.0)
    cache_->lmax =
        power_iteration_largest([&](const Vector& v) { return q_->apply(v); }, dim_);
  return cache_->lmax;
}

std::pair<double, Vector> eval_objective(const QuadraticObjective& obj, const Vector& u) {
  return {obj.value(u), obj.gradient(u)};
}

ModelProblem::ModelProblem(QuadraticObjective obj, LinearOperator s, ConvexSet k,
                           std::optional<Vector> witness)
    : objective(std::move(obj)), S(std::move(s)), K(std::move(k)),
      feasible_witness(std::move(witness)) {
  if (objective.dim() != S.cols())
    throw DimensionError("model problem: objective/operator dimension mismatch");
  if (S.rows() != K.dim())
    throw DimensionError("model problem: operator/set dimension mismatch");
  if (feasible_witness) {
    if (feasible_witness->size() != S.cols())
      throw DimensionError("model problem: witness dimension mismatch");
    if (!K.contains(S.apply(*feasible_witness), 1e-8))
      throw FeasibilityError("model problem: witness is not feasible");
  }
}

void NonlinearProblemSpec::check_jacobian(const Vector& around, std::uint64_t seed) const {
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5ull);
  for (int probe = 0; probe < 5; ++probe) {
    Vector u(around);
    for (auto& x : u) x += 0.1 * (portable_u01(rng) - 0.5);
    const Matrix jac = jac_g(u);
    if (jac.cols() != u.size())
      throw DimensionError("jacobian oracle: wrong number of columns");
    for (Index j = 0; j < u.size(); ++j) {
      const double h = 1e-6 * (1.0 + std::abs(u[j]));
      Vector up(u), um(u);
      up[j] += h;
      um[j] -= h;
      const Vector diff = scaled(sub(g(up), g(um)), 0.5 / h);
      if (diff.size() != jac.rows())
        throw DimensionError("constraint oracle: inconsistent output dimension");
      double err = 0.0, ref = 0.0;
      for (Index i = 0; i < diff.size(); ++i) {
        err += (diff[i] - jac(i, j)) * (diff[i] - jac(i, j));
        ref += diff[i] * diff[i];
      }
      if (std::sqrt(err) > 1e-5 * (1.0 + std::sqrt(ref)))
        throw InvalidInputError(
            "jacobian oracle disagrees with finite differences at column " +
            std::to_string(j));
    }
  }
}

SurrogateModel build_surrogate(const NonlinearProblemSpec& spec, const Vector& u_star,
                               double c) {
  if (!(c > 0.0)) throw InvalidInputError("build_surrogate: curvature must be positive");
  if (u_star.size() != spec.u_dim)
    throw DimensionError("build_surrogate: anchor dimension mismatch");
  spec.check_jacobian(u_star);

  const Vector g_star = spec.g(u_star);
  const Matrix jac = spec.jac_g(u_star);
  const Vector grad = spec.grad_f(u_star);
  const double f_star = spec.f(u_star);

  // theta_s(u) = f* + <grad, u - u*> + (c/2)|u - u*|^2, expanded around zero.
  Matrix q(u_star.size(), u_star.size());
  for (Index i = 0; i < u_star.size(); ++i) q(i, i) = c;
  Vector b = scaled(u_star, c);
  axpy(-1.0, grad, b);
  const double constant =
      f_star - dot(grad, u_star) + 0.5 * c * norm_sq(u_star);

  LinearOperator s = LinearOperator::dense(jac);
  // K = constraint_set - G(u*) + G'(u*) u*.
  Vector offset = s.apply(u_star);
  axpy(-1.0, g_star, offset);
  ConvexSet k = ConvexSet::shift(spec.constraint_set, offset);

  if (!spec.constraint_set.contains(g_star, 1e-8))
    throw FeasibilityError("build_surrogate: anchor is infeasible, G(u*) not in K");
  // Translation identity: S u* in K iff G(u*) in the original set.
  if (!k.contains(s.apply(u_star), 1e-8))
    throw Error("build_surrogate: translation identity violated");

  SurrogateModel out{
      ModelProblem(QuadraticObjective(std::move(q), std::move(b), constant),
                   std::move(s), std::move(k)),
      u_star, c};
  return out;
}

std::pair<KktResiduals, KktResiduals> surrogate_kkt_equivalence(
    const NonlinearProblemSpec& spec, const Vector& u_star, const Vector& lambda_bar,
    const SamplePlan& plan) {
  SurrogateModel sm = build_surrogate(spec, u_star, 1.0);
  const Vector grad = spec.grad_f(u_star);
  Vector station = add(grad, sm.base.S.apply_adjoint(lambda_bar));
  const double stationarity = norm(station);

  const Vector anchor_surrogate = sm.base.S.apply(u_star);
  const Vector anchor_original = spec.g(u_star);
  KktResiduals surrogate{
      stationarity,
      normal_cone_residual(sm.base.K, anchor_surrogate, lambda_bar, plan)};
  KktResiduals original{
      stationarity,
      normal_cone_residual(spec.constraint_set, anchor_original, lambda_bar, plan)};

  if (std::abs(surrogate.complementarity - original.complementarity) > 1e-10)
    throw Error("surrogate_kkt_equivalence: residual pairs disagree beyond 1e-10");
  return {surrogate, original};
}

ConeMembership linearizing_cone_contains(const NonlinearProblemSpec& spec,
                                         const Vector& u_bar, const Vector& v,
                                         double tol) {
  const Vector g_bar = spec.g(u_bar);
  if (!spec.constraint_set.contains(g_bar, tol))
    throw FeasibilityError("linearizing_cone_contains: base point infeasible");
  if (norm(v) == 0.0) return {true, 1.0};

  const Matrix jac = spec.jac_g(u_bar);
  for (int e = -20; e <= 20; ++e) {
    const double t = std::ldexp(1.0, e);
    const Vector step = jac.apply(scaled(v, 1.0 / t));
    // Tolerance scales with the probe step; a fixed tolerance would accept
    // every direction once t grows large enough.
    const double tol_eff = tol * (norm(step) + 1e-15);
    if (spec.constraint_set.contains(add(g_bar, step), tol_eff)) return {true, t};
  }
  return {false, 0.0};
}

}  // namespace almlab
