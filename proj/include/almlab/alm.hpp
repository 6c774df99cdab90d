#pragma once

#include <optional>
#include <string>
#include <vector>

#include "almlab/problem.hpp"

namespace almlab {

struct InnerConfig {
  int max_iter = 500000;
  double tol_grad_abs = 1e-9;
  // Per-outer tolerance tol_grad_abs / k^p, so inexactness is summable.
  double tighten_exponent = 2.0;
};

struct AlmConfig {
  double beta = 1.0;
  std::optional<Vector> lambda0;  // defaults to zero
  int max_outer = 200;
  double tol_primal = 1e-8;  // on |r^k|
  double tol_step = 1e-10;   // on |u^k - u^{k-1}|
  InnerConfig inner;
};

struct AlmRecord {
  int k = 0;
  Vector u, zeta, lambda;
  double r_norm = 0.0;
  double objective = 0.0;
  double lambda_norm = 0.0;
  double fejer_slack = 0.0;
  std::vector<double> probe_values;  // <lambda^k, S v_j>
  int inner_iterations = 0;
};

struct AlmTrace {
  std::vector<AlmRecord> records;
  std::vector<Vector> probes;
  Vector lambda0;
  double beta = 1.0;
};

struct Solution {
  Vector u_final, zeta_final, lambda_final;
  bool converged = false;
  std::string termination_reason;
};

// Solver failures carry whatever trace was accumulated.
class AlmError : public Error {
 public:
  AlmError(const std::string& msg, AlmTrace trace)
      : Error(msg), partial_trace(std::move(trace)) {}
  AlmTrace partial_trace;
};

struct InnerResult {
  Vector u, zeta;
  int iterations = 0;
};

// Joint (u, zeta) minimization of the augmented Lagrangian via its Moreau
// reduction F_beta(u) = theta(u) + (beta/2) dist^2(Su + lambda/beta, K),
// by constant-step gradient descent with step 1/L. A singleton K is solved
// exactly through one SPD solve.
InnerResult inner_solve(const ModelProblem& problem, const Vector& lambda, double beta,
                        const Vector& warm_start, double tol_grad, int max_iter);

// Canonical basis for dimensions up to 16, otherwise 8 seeded unit vectors.
std::vector<Vector> default_probes(Index dim, std::uint64_t seed = 0);

// Classical augmented Lagrangian method with full trace recording.
std::pair<Solution, AlmTrace> alm_solve(const ModelProblem& problem,
                                        const AlmConfig& cfg,
                                        std::vector<Vector> probes = {});

struct MonitorReport {
  std::vector<double> fejer_slacks;       // per transition k -> k+1
  std::vector<double> residual_partial_sums;  // running sum of |r^k|^2
  double max_fejer_slack = 0.0;
  bool fejer_ok = false;
  // Increment of the partial sums over the last quarter of the run.
  double tail_increment = 0.0;
};

// Per-iteration Fejer slack |r^{k+1}|^2 - |r^k|^2 + |r^{k+1}-r^k|^2
// + (2 c0 / beta) |u^{k+1}-u^k|^2 (nonpositive for exact solves) and the
// partial sums of |r^k|^2.
MonitorReport convergence_monitors(const AlmTrace& trace, double c0, double beta,
                                   double slack);

struct BregmanReport {
  std::vector<double> distances;  // D_k against the reference pair
  double min_distance = 0.0;
  double max_telescoping_gap = 0.0;
  bool nonnegative_ok = false;
  bool telescoping_ok = false;
};

// Bregman distances D_k to a feasible reference pair (u_ref, zeta_ref) with
// S u_ref = zeta_ref, and the telescoping identity
// sum_{k=n}^{m} (D-step_k + beta |r^{k+1}|^2) = D_n - D_{m+1}.
BregmanReport bregman_monitor(const AlmTrace& trace, const ModelProblem& problem,
                              const Vector& u_ref, const Vector& zeta_ref,
                              double slack);

struct WakktReport {
  // stationarity[k][j] = <Dtheta(u_final), v_j> + <lambda^k, S v_j>
  std::vector<std::vector<double>> stationarity;
  // max over sampled zeta of <lambda^k, zeta - S u_final>
  std::vector<double> complementarity_max;
  // max over directions, samples and the t grid of the combined form
  // <Dtheta(u_final), v> + <lambda^k, S v + t (zeta - S u_final)>
  std::vector<double> combined_max;
  std::vector<Vector> zeta_samples;
};

WakktReport wakkt_residuals(const ModelProblem& problem, const AlmTrace& trace,
                            const std::vector<Vector>& test_dirs,
                            const SamplePlan& k_samples,
                            const std::vector<double>& t_grid);

}  // namespace almlab
