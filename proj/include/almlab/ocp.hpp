#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "almlab/alm.hpp"
#include "almlab/problem.hpp"

namespace almlab {

// 1D Poisson control on (0,1): minimize 1/2 |Lu - y_d|^2 + (alpha/2)|u|^2
// over the interior mesh with h = 1/(n+1), where L is the inverse of the
// Dirichlet finite-difference Laplacian. Componentwise bounds constrain the
// state, the control, or both. The stacked form uses S = [L; I] with
// K = Y_ad x U_ad; the reduced form uses S = L with K = Y_ad.
struct OcpSpec {
  enum class ConstraintKind { State, Control, Both };

  int n = 31;
  double alpha = 1e-2;
  // Desired state: either a function of x or explicit mesh values.
  std::function<double(double)> y_d = [](double x) {
    return 4.0 * std::sin(3.141592653589793 * x);
  };
  std::optional<Vector> y_d_values;
  ConstraintKind kind = ConstraintKind::Control;
  // Constant bounds; a mesh function, when set, overrides the constant.
  double state_lo = -std::numeric_limits<double>::infinity();
  double state_hi = std::numeric_limits<double>::infinity();
  double control_lo = -std::numeric_limits<double>::infinity();
  double control_hi = std::numeric_limits<double>::infinity();
  std::function<double(double)> state_lo_fn, state_hi_fn;
  std::function<double(double)> control_lo_fn, control_hi_fn;
  bool stacked = true;
};

// Main and off diagonals of the SPD tridiagonal (1/h^2) tridiag(-1, 2, -1).
void fd_laplacian_diagonals(int n, Vector& diag, Vector& off);
// Action of that tridiagonal matrix.
Vector fd_laplacian_apply(const Vector& diag, const Vector& off, const Vector& v);
// Mesh values of a function at x_i = i h, i = 1..n.
Vector mesh_values(int n, const std::function<double(double)>& f);

ModelProblem build_ocp(const OcpSpec& spec);

struct MeshStudyRow {
  int n = 0;
  double h = 0.0;
  double lambda_norm_state = 0.0;    // sqrt(h sum lambda_i^2) over the state block
  double lambda_norm_control = 0.0;  // same over the control block
  double u_distance = 0.0;           // discrete L2 distance to the restricted reference
  int iterations = 0;
  bool solved = false;
  std::string note;
};

using StudyObserver =
    std::function<void(int n, const ModelProblem&, const Solution&, const AlmTrace&)>;

// Solves the family over increasing meshes, recording block multiplier norms
// and the distance of u to the finest-mesh solution restricted to each mesh.
// Solver failures are recorded per row and the study continues. The observer,
// when given, sees every per-row solve.
std::vector<MeshStudyRow> mesh_refinement_study(const OcpSpec& base,
                                                const std::vector<int>& meshes,
                                                const AlmConfig& cfg,
                                                const StudyObserver& observer = {});

struct EigenExampleReport {
  double mu1 = 0.0;              // first discrete Dirichlet eigenvalue
  double mu1_closed_form = 0.0;  // (2/h^2)(1 - cos(pi h))
  double stationarity_residual = 0.0;
  double continuum_gap = 0.0;  // |mu1 - pi^2|
  Vector eigenvector;          // normalized so h |u|^2 = 1
};

// First Dirichlet eigenpair by inverse power iteration, then the surrogate
// KKT stationarity residual with multiplier -mu1 for the quadratic-form
// objective under the normalization constraint.
EigenExampleReport eigen_example_check(int n, double tol);

}  // namespace almlab
