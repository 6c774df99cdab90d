#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include "almlab/linalg.hpp"
#include "almlab/sets.hpp"

namespace almlab {

// theta(u) = 1/2 <u, Qu> - <b, u> + c with Q symmetric positive definite.
// The curvature is either a dense matrix or, for large problems, a
// self-adjoint action with explicitly supplied curvature bounds.
class QuadraticObjective {
 public:
  QuadraticObjective(Matrix q, Vector b, double c);
  static QuadraticObjective implicit(std::function<Vector(const Vector&)> apply_q,
                                     Index dim, Vector b, double c,
                                     double curvature_lower, double curvature_upper);

  Index dim() const { return dim_; }
  double value(const Vector& u) const;
  Vector gradient(const Vector& u) const;
  Vector apply_curvature(const Vector& u) const;

  // c0: smallest eigenvalue of Q (a lower bound in the implicit case).
  double strong_convexity() const;
  // lambda_max(Q) (an upper bound in the implicit case).
  double curvature_upper() const;

  const std::optional<Matrix>& dense_curvature() const { return q_; }
  const Vector& linear_term() const { return b_; }
  double constant_term() const { return c_; }

 private:
  QuadraticObjective() = default;
  // Lazily computed spectral bounds, shared across copies and guarded so
  // const evaluation stays safe under concurrent use.
  struct SpectralCache {
    std::mutex mutex;
    double c0 = -1.0;
    double lmax = -1.0;
  };
  Index dim_ = 0;
  std::optional<Matrix> q_;
  std::function<Vector(const Vector&)> apply_q_;
  Vector b_;
  double c_ = 0.0;
  std::shared_ptr<SpectralCache> cache_{std::make_shared<SpectralCache>()};
};

// (value, gradient) of the objective at u.
std::pair<double, Vector> eval_objective(const QuadraticObjective& obj, const Vector& u);

// min theta(u) s.t. Su in K.
struct ModelProblem {
  QuadraticObjective objective;
  LinearOperator S;
  ConvexSet K;
  std::optional<Vector> feasible_witness;

  ModelProblem(QuadraticObjective obj, LinearOperator s, ConvexSet k,
               std::optional<Vector> witness = std::nullopt);
};

// Nonlinear program min f(u) s.t. G(u) in constraint_set, given through
// user oracles. The Jacobian oracle is sanity-checked against central finite
// differences before any multiplier diagnostics run.
struct NonlinearProblemSpec {
  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> grad_f;
  std::function<Vector(const Vector&)> g;
  std::function<Matrix(const Vector&)> jac_g;
  ConvexSet constraint_set;
  Index u_dim = 0;

  void check_jacobian(const Vector& around, std::uint64_t seed = 0) const;
};

// Strongly convex linearization sharing the KKT system of the nonlinear
// problem at the anchor.
struct SurrogateModel {
  ModelProblem base;
  Vector anchor;
  double curvature;
};

SurrogateModel build_surrogate(const NonlinearProblemSpec& spec, const Vector& u_star,
                               double c = 1.0);

struct KktResiduals {
  double stationarity = 0.0;
  double complementarity = 0.0;
};

// KKT residual pairs of the surrogate and of the original problem at u_star
// for the candidate multiplier; the two pairs must agree to 1e-10.
std::pair<KktResiduals, KktResiduals> surrogate_kkt_equivalence(
    const NonlinearProblemSpec& spec, const Vector& u_star, const Vector& lambda_bar,
    const SamplePlan& plan);

struct ConeMembership {
  bool inside = false;
  double witness_t = 0.0;
};

// Membership of v in the linearizing cone at u_bar, decided over a geometric
// grid of positive scalings; reports the witnessing scale.
ConeMembership linearizing_cone_contains(const NonlinearProblemSpec& spec,
                                         const Vector& u_bar, const Vector& v,
                                         double tol);

}  // namespace almlab
