#include "almlab/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace almlab {

namespace {

double portable_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Columns of `basis` restricted to the orthogonal complement of `t` within
// the coordinate space of the basis: returns basis * Z where Z has
// orthonormal columns spanning {w : <w, t> = 0}.
Matrix kernel_within_basis(const Matrix& basis, const Vector& t, double tol) {
  const Index r = basis.cols();
  const double tn = norm(t);
  if (tn <= tol) return basis;  // functional vanishes on the whole subspace
  // Householder reflector mapping t/|t| to e_0; columns 1..r-1 of the
  // reflector span the orthogonal complement.
  Vector v = scaled(t, 1.0 / tn);
  v[0] += (v[0] >= 0.0 ? 1.0 : -1.0);
  const double vn2 = norm_sq(v);
  Matrix z(r, r > 0 ? r - 1 : 0);
  for (Index j = 1; j < r; ++j) {
    Vector col = unit(r, j);
    axpy(-2.0 * v[j] / vn2, v, col);
    for (Index i = 0; i < r; ++i) z(i, j - 1) = col[i];
  }
  Matrix out(basis.rows(), z.cols());
  for (Index i = 0; i < basis.rows(); ++i)
    for (Index j = 0; j < z.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < r; ++k) s += basis(i, k) * z(k, j);
      out(i, j) = s;
    }
  return out;
}

// Subspaces given by orthonormal column bases are equal when the dimensions
// match and every principal angle is (numerically) zero.
bool subspaces_equal(const Matrix& b1, const Matrix& b2, double tol) {
  if (b1.cols() != b2.cols()) return false;
  const Index k = b1.cols();
  if (k == 0) return true;
  Matrix m(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      double s = 0.0;
      for (Index a = 0; a < b1.rows(); ++a) s += b1(a, i) * b2(a, j);
      m(i, j) = s;
    }
  // Cosines of the principal angles are the singular values of M.
  Matrix mtm(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      double s = 0.0;
      for (Index a = 0; a < k; ++a) s += m(a, i) * m(a, j);
      mtm(i, j) = s;
    }
  SymmetricEigen eig = jacobi_eigen(mtm);
  const double sigma_min = std::sqrt(std::max(eig.values.front(), 0.0));
  return sigma_min >= 1.0 - tol;
}

}  // namespace

Matrix range_basis(const LinearOperator& s, double rank_tol) {
  const Matrix sst = s.outer_gram();
  SymmetricEigen eig = jacobi_eigen(sst);
  double lam_max = 0.0;
  for (double v : eig.values) lam_max = std::max(lam_max, v);
  const double tau = rank_tol * std::max(lam_max, 1e-300);
  std::vector<Index> keep;
  for (Index j = 0; j < eig.values.size(); ++j)
    if (eig.values[j] > tau) keep.push_back(j);
  Matrix basis(sst.rows(), keep.size());
  for (Index c = 0; c < keep.size(); ++c)
    for (Index i = 0; i < sst.rows(); ++i) basis(i, c) = eig.vectors(i, keep[c]);
  return basis;
}

Vector project_onto_range(const LinearOperator& s, const Vector& x, double rank_tol) {
  const Matrix basis = range_basis(s, rank_tol);
  Vector out = zeros(x.size());
  for (Index j = 0; j < basis.cols(); ++j) {
    double c = 0.0;
    for (Index i = 0; i < x.size(); ++i) c += basis(i, j) * x[i];
    for (Index i = 0; i < x.size(); ++i) out[i] += c * basis(i, j);
  }
  return out;
}

MultiplierReport essential_multiplier(const ModelProblem& problem, const Vector& u_star,
                                      double rank_tol, const SamplePlan& plan,
                                      const std::vector<Vector>& extra_zeta) {
  const LinearOperator& s = problem.S;
  const Vector su_star = s.apply(u_star);
  if (!problem.K.contains(su_star, 1e-8))
    throw FeasibilityError("essential_multiplier: S u* is not in K");

  MultiplierReport report;
  const Vector g = problem.objective.gradient(u_star);

  // lambda* = S y with (S*S) y = -g solved in the min-norm sense.
  const Matrix gram = s.gram();
  MinNormSolution mns = min_norm_solve(gram, scaled(g, -1.0), rank_tol);
  Vector lambda_star = s.apply(mns.y);
  report.stationarity_residual = norm(add(s.apply_adjoint(lambda_star), g));
  report.exists_verdict =
      report.stationarity_residual <= rank_tol * (1.0 + norm(g));
  report.essential = lambda_star;

  // Spectrum of S: rank and smallest positive singular value from the gram.
  {
    SymmetricEigen eig = jacobi_eigen(gram);
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, v);
    const double tau = rank_tol * std::max(lam_max, 1e-300);
    double smallest = std::numeric_limits<double>::infinity();
    int rank = 0;
    for (double v : eig.values)
      if (v > tau) {
        ++rank;
        smallest = std::min(smallest, v);
      }
    report.rank_S = rank;
    report.sigma_min_positive = rank > 0 ? std::sqrt(smallest) : 0.0;
  }

  // Kernel of S* from the eigenvectors of S S^T below threshold.
  {
    const Matrix sst = s.outer_gram();
    SymmetricEigen eig = jacobi_eigen(sst);
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, v);
    const double tau = rank_tol * std::max(lam_max, 1e-300);
    for (Index j = 0; j < eig.values.size(); ++j) {
      if (eig.values[j] <= tau) {
        Vector basis_vec(sst.rows());
        for (Index i = 0; i < sst.rows(); ++i) basis_vec[i] = eig.vectors(i, j);
        report.kernel_S_star_basis.push_back(std::move(basis_vec));
      }
    }
  }

  // Sampled zeta in K intersect range(S): project samples of K onto range(S)
  // and keep the ones that stay in K; S u* and supplied iterates always join.
  std::vector<Vector> candidates = anchored_samples(problem.K, su_star, plan);
  for (const auto& z : extra_zeta) candidates.push_back(z);
  if (norm(lambda_star) > 0.0) {
    if (auto sp = problem.K.support_point(lambda_star))
      candidates.push_back(std::move(*sp));
  }
  double violation = 0.0;  // zeta = S u* itself always contributes 0
  for (const auto& z : candidates) {
    const Vector zr = project_onto_range(s, z, rank_tol);
    if (!problem.K.contains(zr, 1e-9)) continue;
    violation = std::max(violation, dot(lambda_star, sub(zr, su_star)));
  }
  report.vi_violation = violation;
  return report;
}

std::pair<bool, MultiplierReport> optimality_certificate(const ModelProblem& problem,
                                                         const Vector& u_candidate,
                                                         double tol,
                                                         const SamplePlan& plan) {
  MultiplierReport report;
  OptimalityCertificate cert;
  cert.tol = tol;
  cert.feasible = problem.K.contains(problem.S.apply(u_candidate), 1e-8);
  if (cert.feasible) {
    report = essential_multiplier(problem, u_candidate, 1e-8, plan);
    cert.multiplier_exists = report.exists_verdict;
    cert.vi_violation = report.vi_violation;
    cert.certified =
        cert.feasible && cert.multiplier_exists && report.vi_violation <= tol;
  }
  report.certificate = cert;
  return {cert.certified, report};
}

ProperCandidateAnalysis proper_candidate_check(const ModelProblem& problem,
                                               const Vector& u_star,
                                               const Vector& lambda_bar, double tol,
                                               const SamplePlan& plan) {
  MultiplierReport essential = essential_multiplier(problem, u_star, 1e-10, plan);

  ProperCandidateAnalysis out;
  out.candidate = lambda_bar;
  const Vector g = problem.objective.gradient(u_star);
  out.stationarity_residual = norm(add(problem.S.apply_adjoint(lambda_bar), g));
  out.normal_cone_residual =
      normal_cone_residual(problem.K, problem.S.apply(u_star), lambda_bar, plan);
  const Vector restricted = project_onto_range(problem.S, lambda_bar, 1e-10);
  out.restriction_gap = norm(sub(restricted, *essential.essential));
  (void)tol;
  return out;
}

CompatibilityResult compatibility_consistency_check(const ModelProblem& problem,
                                                    const Vector& u_star,
                                                    const Vector& lambda_star,
                                                    const Vector& lambda_tilde,
                                                    const Vector& zeta0, double tol) {
  if (norm(lambda_star) <= tol)
    throw InvalidInputError(
        "compatibility_consistency_check: lambda* must be nonzero");
  const Vector zeta0_in_range = project_onto_range(problem.S, zeta0, 1e-10);
  if (norm(sub(zeta0_in_range, zeta0)) > tol * (1.0 + norm(zeta0)))
    throw InvalidInputError("compatibility_consistency_check: zeta0 not in range(S)");

  CompatibilityResult out;
  const Matrix basis = range_basis(problem.S, 1e-10);

  // Coordinates of the functionals within range(S).
  const Index r = basis.cols();
  Vector t_tilde(r, 0.0), t_star(r, 0.0);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < lambda_tilde.size(); ++i) {
      t_tilde[j] += basis(i, j) * lambda_tilde[i];
      t_star[j] += basis(i, j) * lambda_star[i];
    }
  const Matrix k_tilde = kernel_within_basis(basis, t_tilde, tol * (1.0 + norm(lambda_tilde)));
  const Matrix k_star = kernel_within_basis(basis, t_star, tol * (1.0 + norm(lambda_star)));
  out.compatibility = subspaces_equal(k_tilde, k_star, tol);

  const double pair_tilde = dot(lambda_tilde, zeta0);
  const double pair_star = dot(lambda_star, zeta0);
  out.consistency = pair_tilde > tol && pair_star > tol;

  if (out.compatibility && out.consistency) {
    out.t0 = pair_star / pair_tilde;
    out.constructed = scaled(lambda_tilde, out.t0);
    SamplePlan plan;
    plan.count = 128;
    plan.seed = 20240001;
    ProperCandidateAnalysis analysis =
        proper_candidate_check(problem, u_star, *out.constructed, tol, plan);
    analysis.compatibility = true;
    analysis.consistency = true;
    analysis.witness_zeta0 = zeta0;
    analysis.constructed = out.constructed;
    analysis.t0 = out.t0;
    if (analysis.stationarity_residual > 1e-6 * (1.0 + norm(lambda_star)) ||
        analysis.normal_cone_residual > 1e-8)
      throw Error(
          "compatibility_consistency_check: constructed candidate failed the "
          "proper-multiplier checks");
    out.constructed_analysis = std::move(analysis);
  }
  return out;
}

std::vector<Vector> normal_cone_candidates(const ConvexSet& set, const Vector& anchor,
                                           int count, std::uint64_t seed) {
  std::vector<Vector> generators = set.normal_directions(anchor);
  std::vector<Vector> out;
  for (const auto& g : generators) out.push_back(g);
  if (generators.size() >= 2) {
    std::mt19937_64 rng(seed ^ 0xc0e5ull);
    while (static_cast<int>(out.size()) < count) {
      Vector combo = zeros(anchor.size());
      for (const auto& g : generators) {
        const double w = portable_u01(rng);
        axpy(w * w, g, combo);
      }
      const double n = norm(combo);
      if (n > 1e-12) out.push_back(scaled(combo, 1.0 / n));
    }
  }
  return out;
}

ProbeGapTable multiplier_convergence_probe(const AlmTrace& trace,
                                           const Vector& lambda_star,
                                           const LinearOperator& s,
                                           const std::vector<Vector>& probes) {
  ProbeGapTable table;
  std::vector<double> star_values;
  std::vector<Vector> s_probes;
  for (const auto& v : probes) {
    s_probes.push_back(s.apply(v));
    star_values.push_back(dot(lambda_star, s_probes.back()));
  }
  for (const auto& rec : trace.records) {
    std::vector<double> row;
    row.reserve(probes.size());
    for (std::size_t j = 0; j < probes.size(); ++j)
      row.push_back(std::abs(dot(rec.lambda, s_probes[j]) - star_values[j]));
    table.gaps.push_back(std::move(row));
  }
  const std::size_t n = table.gaps.size();
  for (std::size_t i = n - n / 4; i < n; ++i)
    for (double g : table.gaps[i])
      table.last_quarter_max = std::max(table.last_quarter_max, g);
  return table;
}

std::vector<RangeDiagnosticRow> closed_range_diagnostic(
    const std::vector<LinearOperator>& family, double rank_tol) {
  std::vector<RangeDiagnosticRow> rows;
  int idx = 0;
  for (const auto& op : family) {
    SymmetricEigen eig = jacobi_eigen(op.gram());
    double lam_max = 0.0;
    for (double v : eig.values) lam_max = std::max(lam_max, v);
    const double tau = rank_tol * std::max(lam_max, 1e-300);
    RangeDiagnosticRow row;
    row.index = idx++;
    double smallest = std::numeric_limits<double>::infinity();
    for (double v : eig.values)
      if (v > tau) {
        ++row.rank;
        smallest = std::min(smallest, v);
      }
    row.sigma_min_positive = row.rank > 0 ? std::sqrt(smallest) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace almlab
