#pragma once

// Independent oracles used by the unit and acceptance suites. Everything here
// is test-only and must stay independent of the solver paths it checks.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "almlab/linalg.hpp"
#include "almlab/problem.hpp"
#include "almlab/sets.hpp"

namespace almlab::testing {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Random box-constrained QPs: min 1/2 u'Qu - b'u s.t. lo <= Su <= hi
// ---------------------------------------------------------------------------

struct RandomQp {
  Matrix q;
  Vector b;
  Matrix s;
  Vector lo, hi;
};

inline RandomQp make_random_qp(std::uint64_t seed, Index dim) {
  std::mt19937_64 rng(seed);
  RandomQp qp;
  // Q = A^T A / dim + 0.1 I keeps lambda_min >= 0.1.
  Matrix a(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) a(i, j) = 2.0 * u01(rng) - 1.0;
  qp.q = Matrix(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) {
      double sum = 0.0;
      for (Index k = 0; k < dim; ++k) sum += a(k, i) * a(k, j);
      qp.q(i, j) = sum / static_cast<double>(dim) + (i == j ? 0.1 : 0.0);
    }
  qp.b.resize(dim);
  for (auto& v : qp.b) v = 2.0 * u01(rng) - 1.0;
  // Diagonally dominant S stays comfortably invertible.
  qp.s = Matrix::identity(dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) qp.s(i, j) += 0.3 * (2.0 * u01(rng) - 1.0);

  const Vector z = qp.s.apply(solve_spd(qp.q, qp.b));
  qp.lo.resize(dim);
  qp.hi.resize(dim);
  for (Index i = 0; i < dim; ++i) {
    const double w = 0.2 + u01(rng);
    const int mode = static_cast<int>(rng() % 3);
    if (mode == 0) {  // unconstrained optimum inside
      qp.lo[i] = z[i] - w;
      qp.hi[i] = z[i] + w;
    } else if (mode == 1) {  // box below: upper bound likely active
      qp.hi[i] = z[i] - 0.05 - 0.5 * u01(rng);
      qp.lo[i] = qp.hi[i] - w;
    } else {  // box above: lower bound likely active
      qp.lo[i] = z[i] + 0.05 + 0.5 * u01(rng);
      qp.hi[i] = qp.lo[i] + w;
    }
  }
  return qp;
}

inline ModelProblem qp_problem(const RandomQp& qp) {
  return ModelProblem(QuadraticObjective(qp.q, qp.b, 0.0),
                      LinearOperator::dense(qp.s), ConvexSet::box(qp.lo, qp.hi));
}

// Brute-force active-set enumeration over all 3^m bound patterns: solve each
// equality-constrained candidate and keep the feasible one with least value.
inline std::optional<Vector> active_set_oracle(const RandomQp& qp) {
  const Index dim = qp.b.size();
  const CholeskyFactor q_chol(qp.q);
  const Vector q_inv_b = q_chol.solve(qp.b);

  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<int> pattern(dim, 0);

  const Index total = static_cast<Index>(std::pow(3.0, static_cast<double>(dim)));
  for (Index code = 0; code < total; ++code) {
    Index c = code;
    std::vector<Index> active;
    Vector bounds;
    for (Index i = 0; i < dim; ++i) {
      pattern[i] = static_cast<int>(c % 3);
      c /= 3;
      if (pattern[i] == 1) {
        active.push_back(i);
        bounds.push_back(qp.lo[i]);
      } else if (pattern[i] == 2) {
        active.push_back(i);
        bounds.push_back(qp.hi[i]);
      }
    }

    Vector u;
    if (active.empty()) {
      u = q_inv_b;
    } else {
      // Range-space step: (S_A Q^{-1} S_A^T) mu = S_A Q^{-1} b - bounds.
      const Index m = active.size();
      std::vector<Vector> qinv_rows(m);
      for (Index r = 0; r < m; ++r) {
        Vector srow(dim);
        for (Index j = 0; j < dim; ++j) srow[j] = qp.s(active[r], j);
        qinv_rows[r] = q_chol.solve(srow);
      }
      Matrix schur(m, m);
      Vector rhs(m);
      for (Index r = 0; r < m; ++r) {
        for (Index ccol = 0; ccol < m; ++ccol) {
          double sum = 0.0;
          for (Index j = 0; j < dim; ++j) sum += qp.s(active[ccol], j) * qinv_rows[r][j];
          schur(r, ccol) = sum;
        }
        rhs[r] = dot(qinv_rows[r], qp.b) - bounds[r];
      }
      Vector mu;
      try {
        mu = solve_spd(schur, rhs);
      } catch (const Error&) {
        continue;  // degenerate pattern
      }
      Vector shifted = qp.b;
      for (Index r = 0; r < m; ++r)
        for (Index j = 0; j < dim; ++j) shifted[j] -= mu[r] * qp.s(active[r], j);
      u = q_chol.solve(shifted);
    }

    const Vector su = qp.s.apply(u);
    bool feasible = true;
    for (Index i = 0; i < dim && feasible; ++i)
      feasible = su[i] >= qp.lo[i] - 1e-9 && su[i] <= qp.hi[i] + 1e-9;
    if (!feasible) continue;
    const double value = 0.5 * dot(u, qp.q.apply(u)) - dot(qp.b, u);
    if (value < best_value - 1e-14) {
      best_value = value;
      best = u;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Projected gradient for bound-constrained control problems
// min 1/2 |L u - y|^2 + (alpha/2)|u|^2 s.t. lo <= u <= hi
// ---------------------------------------------------------------------------

inline Vector projected_gradient_control(const LinearOperator& l, const Vector& y,
                                         double alpha, double lo, double hi,
                                         int max_iter = 200000, double tol = 1e-11) {
  const Index n = l.cols();
  const double lip = l.norm_bound_sq() + alpha;
  Vector u(n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    Vector grad = l.apply_adjoint(sub(l.apply(u), y));
    axpy(alpha, u, grad);
    Vector next(n);
    for (Index i = 0; i < n; ++i)
      next[i] = std::min(std::max(u[i] - grad[i] / lip, lo), hi);
    const double move = norm(sub(next, u));
    u = std::move(next);
    if (move <= tol) break;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Brute-force projection by grid search (2D sets only)
// ---------------------------------------------------------------------------

template <typename Member>
inline Vector grid_projection_2d(const Vector& x, double lo0, double hi0, double lo1,
                                 double hi1, int steps, Member member) {
  Vector best{0.0, 0.0};
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double a = lo0 + (hi0 - lo0) * i / steps;
      const double b = lo1 + (hi1 - lo1) * j / steps;
      if (!member(a, b)) continue;
      const double d = (a - x[0]) * (a - x[0]) + (b - x[1]) * (b - x[1]);
      if (d < best_d) {
        best_d = d;
        best = {a, b};
      }
    }
  }
  return best;
}

// First Dirichlet eigenvalue of the FD Laplacian on n interior points.
inline double fd_first_eigenvalue(int n) {
  const double h = 1.0 / (n + 1);
  return (2.0 / (h * h)) * (1.0 - std::cos(3.141592653589793 * h));
}

}  // namespace almlab::testing
