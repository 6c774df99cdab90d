#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "almlab/linalg.hpp"

namespace almlab {

// Deterministic sampling plan: finite surrogate for "for all zeta in K".
struct SamplePlan {
  enum class Strategy { BoundaryBiased, UniformProject };
  int count = 64;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::UniformProject;
};

// Closed convex sets with exact projection oracles. Box and ball bounds may
// be infinite; intersections are projected with Dykstra's algorithm and an
// empty intersection surfaces as a DykstraError.
class ConvexSet {
 public:
  struct Box {
    Vector lo, hi;
  };
  struct Singleton {
    Vector point;
  };
  // <normal, x> <= offset
  struct Halfspace {
    Vector normal;
    double offset;
  };
  struct Ball {
    Vector center;
    double radius;
  };
  // inner + offset
  struct Shifted {
    std::shared_ptr<const ConvexSet> inner;
    Vector offset;
  };
  struct Product {
    std::vector<ConvexSet> factors;
  };
  struct Intersection {
    std::vector<ConvexSet> members;
  };
  using Node =
      std::variant<Box, Singleton, Halfspace, Ball, Shifted, Product, Intersection>;

  // Zero-dimensional set (empty product); placeholder until assigned.
  ConvexSet() : ConvexSet(Product{}, 0) {}

  static ConvexSet box(Vector lo, Vector hi);
  static ConvexSet singleton(Vector point);
  static ConvexSet halfspace(Vector normal, double offset);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet shift(ConvexSet inner, Vector offset);
  static ConvexSet product(std::vector<ConvexSet> factors);
  static ConvexSet intersection(std::vector<ConvexSet> members);
  static ConvexSet whole_space(Index n);

  Index dim() const { return dim_; }
  const Node& node() const { return *node_; }

  Vector project(const Vector& x, double tol = 1e-12) const;
  bool contains(const Vector& x, double tol) const;

  // If the set is a single point (possibly shifted / a product of points),
  // returns it.
  std::optional<Vector> singleton_point() const;
  // Finite box enclosing the sampled region; unbounded directions fall back
  // to fallback_center +- 32 * (1 + |center|).
  void bounding_box(Vector& lo, Vector& hi, const Vector& fallback_center) const;
  // Maximizer of <d, x> over the set, when a closed form exists.
  std::optional<Vector> support_point(const Vector& d) const;
  // Unit generators of the normal cone at a boundary point (empty if the
  // anchor is interior).
  std::vector<Vector> normal_directions(const Vector& anchor, double tol = 1e-8) const;

 private:
  ConvexSet(Node node, Index dim);
  std::shared_ptr<const Node> node_;
  Index dim_ = 0;
};

// Deterministic points of the set; every returned point satisfies
// contains(set, p, 1e-9).
std::vector<Vector> sample_points(const ConvexSet& set, const SamplePlan& plan);

// Samples used by the normal-cone test at a given anchor: the anchor itself,
// projections of anchor +- s e_i at a few scales, boundary-biased points
// around the anchor, and uniform box samples projected into the set.
std::vector<Vector> anchored_samples(const ConvexSet& set, const Vector& anchor,
                                     const SamplePlan& plan);

// max over sampled zeta in K of <lambda, zeta - anchor>; nonpositive means
// lambda passes the sampled normal-cone test at the anchor.
double normal_cone_residual(const ConvexSet& set, const Vector& anchor,
                            const Vector& lambda, const SamplePlan& plan);

}  // namespace almlab
