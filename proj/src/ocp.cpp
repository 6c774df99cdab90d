#include "almlab/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace almlab {

namespace {

constexpr double kPi = 3.141592653589793;

ConvexSet bounds_box(int n, double lo, double hi,
                     const std::function<double(double)>& lo_fn,
                     const std::function<double(double)>& hi_fn) {
  Vector lo_v = lo_fn ? mesh_values(n, lo_fn) : Vector(n, lo);
  Vector hi_v = hi_fn ? mesh_values(n, hi_fn) : Vector(n, hi);
  return ConvexSet::box(std::move(lo_v), std::move(hi_v));
}

// Piecewise-linear evaluation of mesh data (zero at both boundaries).
double interp_mesh(const Vector& values, double h, double x) {
  const int n = static_cast<int>(values.size());
  const double pos = x / h;
  const int i = static_cast<int>(std::floor(pos));
  const double frac = pos - i;
  auto at = [&](int idx) -> double {
    if (idx <= 0 || idx > n) return 0.0;
    return values[idx - 1];
  };
  return (1.0 - frac) * at(i) + frac * at(i + 1);
}

}  // namespace

void fd_laplacian_diagonals(int n, Vector& diag, Vector& off) {
  if (n < 1) throw InvalidInputError("fd_laplacian_diagonals: n must be positive");
  const double h = 1.0 / (n + 1);
  diag.assign(n, 2.0 / (h * h));
  off.assign(n - 1, -1.0 / (h * h));
}

Vector fd_laplacian_apply(const Vector& diag, const Vector& off, const Vector& v) {
  const Index n = diag.size();
  if (v.size() != n) throw DimensionError("fd_laplacian_apply: dimension mismatch");
  Vector out(n, 0.0);
  for (Index i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += off[i - 1] * v[i - 1];
    if (i + 1 < n) s += off[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

Vector mesh_values(int n, const std::function<double(double)>& f) {
  const double h = 1.0 / (n + 1);
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = f((i + 1) * h);
  return out;
}

ModelProblem build_ocp(const OcpSpec& spec) {
  if (spec.n < 2) throw InvalidInputError("build_ocp: need at least 2 mesh points");
  if (!(spec.alpha > 0.0)) throw InvalidInputError("build_ocp: alpha must be positive");
  if (spec.state_lo > spec.state_hi || spec.control_lo > spec.control_hi)
    throw InvalidInputError("build_ocp: empty bound interval");

  const int n = spec.n;
  Vector diag, off;
  fd_laplacian_diagonals(n, diag, off);
  LinearOperator laplace_inv = LinearOperator::tridiagonal_inverse(diag, off);

  Vector yd = spec.y_d_values ? *spec.y_d_values : mesh_values(n, spec.y_d);
  if (yd.size() != static_cast<Index>(n))
    throw DimensionError("build_ocp: y_d values do not match the mesh");
  const Vector b = laplace_inv.apply(yd);  // L* y_d, L symmetric
  const double constant = 0.5 * norm_sq(yd);

  QuadraticObjective objective = [&]() {
    if (n <= 512) {
      // Q = L*L + alpha I densified.
      Matrix q = laplace_inv.gram();
      for (int i = 0; i < n; ++i) q(i, i) += spec.alpha;
      return QuadraticObjective(std::move(q), b, constant);
    }
    const double lmax = laplace_inv.norm_bound_sq() + spec.alpha;
    LinearOperator li = laplace_inv;
    const double alpha = spec.alpha;
    return QuadraticObjective::implicit(
        [li, alpha](const Vector& u) {
          Vector q = li.apply(li.apply(u));
          axpy(alpha, u, q);
          return q;
        },
        n, b, constant, spec.alpha, lmax);
  }();

  const bool has_state = spec.kind != OcpSpec::ConstraintKind::Control;
  const bool has_control = spec.kind != OcpSpec::ConstraintKind::State;
  const double inf = std::numeric_limits<double>::infinity();
  ConvexSet y_ad = has_state ? bounds_box(n, spec.state_lo, spec.state_hi,
                                          spec.state_lo_fn, spec.state_hi_fn)
                             : bounds_box(n, -inf, inf, {}, {});
  ConvexSet u_ad = has_control
                       ? bounds_box(n, spec.control_lo, spec.control_hi,
                                    spec.control_lo_fn, spec.control_hi_fn)
                       : bounds_box(n, -inf, inf, {}, {});

  if (spec.stacked) {
    LinearOperator s =
        LinearOperator::stack({laplace_inv, LinearOperator::identity(n)});
    ConvexSet k = ConvexSet::product({std::move(y_ad), std::move(u_ad)});
    return ModelProblem(std::move(objective), std::move(s), std::move(k));
  }
  if (has_control)
    throw InvalidInputError("build_ocp: reduced form only covers state constraints");
  return ModelProblem(std::move(objective), laplace_inv, std::move(y_ad));
}

std::vector<MeshStudyRow> mesh_refinement_study(const OcpSpec& base,
                                                const std::vector<int>& meshes,
                                                const AlmConfig& cfg,
                                                const StudyObserver& observer) {
  if (meshes.size() < 2)
    throw InvalidInputError("mesh_refinement_study: need at least 2 meshes");
  for (std::size_t i = 1; i < meshes.size(); ++i)
    if (meshes[i] <= meshes[i - 1])
      throw InvalidInputError("mesh_refinement_study: meshes must increase");

  // Reference control from the finest mesh; that solve doubles as the final
  // row instead of being repeated.
  const int n_ref = meshes.back();
  const double h_ref = 1.0 / (n_ref + 1);
  Vector u_ref;
  std::optional<std::pair<Solution, AlmTrace>> finest;
  {
    OcpSpec spec = base;
    spec.n = n_ref;
    ModelProblem problem = build_ocp(spec);
    finest = alm_solve(problem, cfg);
    u_ref = finest->first.u_final;
  }

  std::vector<MeshStudyRow> rows;
  for (int n : meshes) {
    MeshStudyRow row;
    row.n = n;
    row.h = 1.0 / (n + 1);
    OcpSpec spec = base;
    spec.n = n;
    try {
      ModelProblem problem = build_ocp(spec);
      auto [sol, trace] =
          n == n_ref ? std::move(*finest) : alm_solve(problem, cfg);
      row.iterations = static_cast<int>(trace.records.size());
      row.solved = true;
      if (observer) observer(n, problem, sol, trace);

      const Vector& lam = sol.lambda_final;
      if (spec.stacked) {
        double sy = 0.0, su = 0.0;
        for (int i = 0; i < n; ++i) sy += lam[i] * lam[i];
        for (int i = 0; i < n; ++i) su += lam[n + i] * lam[n + i];
        row.lambda_norm_state = std::sqrt(row.h * sy);
        row.lambda_norm_control = std::sqrt(row.h * su);
      } else {
        row.lambda_norm_state = std::sqrt(row.h * norm_sq(lam));
      }

      double dist = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * row.h;
        const double diff = sol.u_final[i] - interp_mesh(u_ref, h_ref, x);
        dist += diff * diff;
      }
      row.u_distance = std::sqrt(row.h * dist);
    } catch (const Error& e) {
      row.solved = false;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

EigenExampleReport eigen_example_check(int n, double tol) {
  if (n < 3) throw InvalidInputError("eigen_example_check: n must be at least 3");
  const double h = 1.0 / (n + 1);
  Vector diag, off;
  fd_laplacian_diagonals(n, diag, off);
  LinearOperator laplace_inv = LinearOperator::tridiagonal_inverse(diag, off);

  // Inverse power iteration for the first eigenpair of T, run until the
  // eigen-residual is at the rounding floor of |T|.
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(kPi * (i + 1) * h) + 1e-3;
  double mu = 0.0;
  bool converged = false;
  const double t_scale = 2.0 / (h * h);
  for (int it = 0; it < 10000; ++it) {
    Vector y = laplace_inv.apply(x);
    const double yn = norm(y);
    for (auto& v : y) v /= yn;
    Vector ty = fd_laplacian_apply(diag, off, y);
    mu = dot(y, ty);
    axpy(-mu, y, ty);
    x = std::move(y);
    if (norm(ty) <= 1e-12 * t_scale) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SpectralConvergenceError("eigen_example_check: inverse power iteration stalled",
                                   mu);

  // Normalize h |u|^2 = 1.
  const double scale = 1.0 / std::sqrt(h * norm_sq(x));
  Vector u1 = scaled(x, scale);

  // Quadratic-form objective with quadratic normalization constraint.
  NonlinearProblemSpec spec;
  spec.u_dim = n;
  spec.constraint_set = ConvexSet::singleton({1.0});
  spec.f = [diag, off, h](const Vector& u) {
    return h * dot(u, fd_laplacian_apply(diag, off, u));
  };
  spec.grad_f = [diag, off, h](const Vector& u) {
    return scaled(fd_laplacian_apply(diag, off, u), 2.0 * h);
  };
  spec.g = [h](const Vector& u) { return Vector{h * norm_sq(u)}; };
  spec.jac_g = [h, n](const Vector& u) {
    Matrix j(1, n);
    for (int i = 0; i < n; ++i) j(0, i) = 2.0 * h * u[i];
    return j;
  };

  SurrogateModel sm = build_surrogate(spec, u1, 1.0);
  (void)sm;

  EigenExampleReport report;
  report.mu1 = mu;
  report.mu1_closed_form = (2.0 / (h * h)) * (1.0 - std::cos(kPi * h));
  report.continuum_gap = std::abs(mu - kPi * kPi);
  // Stationarity of the shared KKT system with multiplier -mu1.
  const Matrix jac = spec.jac_g(u1);
  Vector station = spec.grad_f(u1);
  axpy(1.0, jac.apply_transpose({-mu}), station);
  report.stationarity_residual = norm(station);
  report.eigenvector = std::move(u1);
  if (report.stationarity_residual > tol)
    throw Error("eigen_example_check: stationarity residual above tolerance");
  return report;
}

}  // namespace almlab
