#pragma once

#include "almlab/problem.hpp"

namespace almlab {
// Small built-in instances used by the CLI and the test suites. All share the
// objective 1/2 [(x1 - alpha)^2 + x2^2] with the rank-one operator
// S = [[1,0],[0,0]] unless noted.
namespace gallery {

// K is the unit ball tangent to range(S) at the origin; the feasible set is
// the x2 axis and only the essential multiplier exists when alpha != 0.
ModelProblem tangent_ball(double alpha);

// Ball cut by the chord zeta1 <= zeta2 (the closed arc-plus-chord region);
// proper multipliers exist exactly for alpha >= 0.
ModelProblem tangent_ball_chord(double alpha);

// K = ball((r,0), r): minimizer (2r, 0), unique proper multiplier
// (alpha - 2r, 0). Requires 0 <= 2r < alpha.
ModelProblem shifted_disk(double alpha, double r);

// Upper half of the shifted disk: proper multipliers (alpha - 2r, t), t <= 0.
ModelProblem half_disk(double alpha, double r);

// min 1/2 x^2 s.t. x = 1 and 2x = 2 (redundant equalities): S = [1; 2],
// K = {(1,2)}; closed-form ALM contraction by 1/(1+5 beta).
ModelProblem redundant_equalities();

// The quadratic objective of the 2D instances.
QuadraticObjective two_dim_objective(double alpha);

}  // namespace gallery
}  // namespace almlab
