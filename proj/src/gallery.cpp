#include "almlab/gallery.hpp"

namespace almlab {
namespace gallery {

namespace {

LinearOperator rank_one_operator() {
  Matrix s(2, 2);
  s(0, 0) = 1.0;
  return LinearOperator::dense(std::move(s));
}

}  // namespace

QuadraticObjective two_dim_objective(double alpha) {
  return QuadraticObjective(Matrix::identity(2), {alpha, 0.0}, 0.5 * alpha * alpha);
}

ModelProblem tangent_ball(double alpha) {
  return ModelProblem(two_dim_objective(alpha), rank_one_operator(),
                      ConvexSet::ball({0.0, 1.0}, 1.0), Vector{0.0, 0.0});
}

ModelProblem tangent_ball_chord(double alpha) {
  ConvexSet k = ConvexSet::intersection(
      {ConvexSet::ball({0.0, 1.0}, 1.0), ConvexSet::halfspace({1.0, -1.0}, 0.0)});
  return ModelProblem(two_dim_objective(alpha), rank_one_operator(), std::move(k),
                      Vector{0.0, 0.0});
}

ModelProblem shifted_disk(double alpha, double r) {
  if (!(0.0 <= 2.0 * r && 2.0 * r < alpha))
    throw InvalidInputError("shifted_disk: requires 0 <= 2r < alpha");
  return ModelProblem(two_dim_objective(alpha), rank_one_operator(),
                      ConvexSet::ball({r, 0.0}, r), Vector{0.0, 0.0});
}

ModelProblem half_disk(double alpha, double r) {
  if (!(0.0 <= 2.0 * r && 2.0 * r < alpha))
    throw InvalidInputError("half_disk: requires 0 <= 2r < alpha");
  ConvexSet k = ConvexSet::intersection(
      {ConvexSet::ball({r, 0.0}, r), ConvexSet::halfspace({0.0, -1.0}, 0.0)});
  return ModelProblem(two_dim_objective(alpha), rank_one_operator(), std::move(k),
                      Vector{0.0, 0.0});
}

ModelProblem redundant_equalities() {
  Matrix s(2, 1);
  s(0, 0) = 1.0;
  s(1, 0) = 2.0;
  return ModelProblem(QuadraticObjective(Matrix::identity(1), {0.0}, 0.0),
                      LinearOperator::dense(std::move(s)),
                      ConvexSet::singleton({1.0, 2.0}), Vector{1.0});
}

}  // namespace gallery
}  // namespace almlab
