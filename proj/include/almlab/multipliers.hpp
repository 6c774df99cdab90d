#pragma once

#include <optional>
#include <vector>

#include "almlab/alm.hpp"
#include "almlab/problem.hpp"

namespace almlab {

struct OptimalityCertificate {
  bool feasible = false;
  bool multiplier_exists = false;
  double vi_violation = 0.0;
  double tol = 0.0;
  bool certified = false;
};

struct MultiplierReport {
  // The unique multiplier in range(S) solving the restricted KKT system,
  // when it exists.
  std::optional<Vector> essential;
  double stationarity_residual = 0.0;
  // max over sampled zeta in K intersect range(S) of <lambda*, zeta - S u*>.
  double vi_violation = 0.0;
  bool exists_verdict = false;
  int rank_S = 0;
  double sigma_min_positive = 0.0;
  std::vector<Vector> kernel_S_star_basis;
  std::optional<OptimalityCertificate> certificate;
};

struct ProperCandidateAnalysis {
  Vector candidate;
  double stationarity_residual = 0.0;
  double normal_cone_residual = 0.0;
  // | Proj_{range(S)} candidate - lambda* |
  double restriction_gap = 0.0;
  bool compatibility = false;
  bool consistency = false;
  std::optional<Vector> witness_zeta0;
  std::optional<Vector> constructed;
  double t0 = 0.0;
};

struct CompatibilityResult {
  bool compatibility = false;
  bool consistency = false;
  double t0 = 0.0;
  std::optional<Vector> constructed;
  std::optional<ProperCandidateAnalysis> constructed_analysis;
};

// Extracts the essential multiplier at u*: solve (S*S) y = -Dtheta(u*) in the
// min-norm sense and set lambda* = S y; the existence verdict is the relative
// stationarity residual test. Extra zeta iterates (for example from an ALM
// trace) enrich the K intersect range(S) sampling.
MultiplierReport essential_multiplier(const ModelProblem& problem, const Vector& u_star,
                                      double rank_tol, const SamplePlan& plan,
                                      const std::vector<Vector>& extra_zeta = {});

// Sampled realization of the optimality characterization: feasible point +
// essential multiplier + nonpositive sampled variational inequality.
std::pair<bool, MultiplierReport> optimality_certificate(const ModelProblem& problem,
                                                         const Vector& u_candidate,
                                                         double tol,
                                                         const SamplePlan& plan);

// Residuals of the classical KKT system for a candidate proper multiplier.
ProperCandidateAnalysis proper_candidate_check(const ModelProblem& problem,
                                               const Vector& u_star,
                                               const Vector& lambda_bar, double tol,
                                               const SamplePlan& plan);

// Compatibility: Ker(lambda_tilde) and Ker(lambda*) cut the same subspace out
// of range(S) (principal-angle test). Consistency: both pair positively with
// zeta0. When both hold the scaled candidate t0 lambda_tilde is returned and
// checked as a proper multiplier.
CompatibilityResult compatibility_consistency_check(const ModelProblem& problem,
                                                    const Vector& u_star,
                                                    const Vector& lambda_star,
                                                    const Vector& lambda_tilde,
                                                    const Vector& zeta0, double tol);

// Conic combinations of the normal-cone generators of K at the anchor,
// deterministic per seed. Used by the search-mode consistency sweeps.
std::vector<Vector> normal_cone_candidates(const ConvexSet& set, const Vector& anchor,
                                           int count, std::uint64_t seed);

struct ProbeGapTable {
  std::vector<std::vector<double>> gaps;  // [k][probe]
  double last_quarter_max = 0.0;
};

// |<lambda^k - lambda*, S v_j>| per iteration and probe direction.
ProbeGapTable multiplier_convergence_probe(const AlmTrace& trace,
                                           const Vector& lambda_star,
                                           const LinearOperator& s,
                                           const std::vector<Vector>& probes);

struct RangeDiagnosticRow {
  int index = 0;
  double sigma_min_positive = 0.0;
  int rank = 0;
};

// Smallest positive singular value and numerical rank per operator; a
// decreasing trend across a refinement family signals loss of closed range
// in the limit.
std::vector<RangeDiagnosticRow> closed_range_diagnostic(
    const std::vector<LinearOperator>& family, double rank_tol);

// Orthonormal basis of range(S) (columns), from the eigendecomposition of
// S S^T above rank_tol * largest.
Matrix range_basis(const LinearOperator& s, double rank_tol);

// Projection of x onto range(S).
Vector project_onto_range(const LinearOperator& s, const Vector& x, double rank_tol);

}  // namespace almlab
