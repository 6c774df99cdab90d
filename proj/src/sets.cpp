#include "almlab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace almlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double portable_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double portable_gauss(std::mt19937_64& rng) {
  // Box-Muller on portable uniforms.
  double u1 = portable_u01(rng);
  while (u1 <= 1e-300) u1 = portable_u01(rng);
  const double u2 = portable_u01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

Vector unit_direction(std::mt19937_64& rng, Index n) {
  Vector d(n);
  double s = 0.0;
  do {
    for (auto& v : d) v = portable_gauss(rng);
    s = norm(d);
  } while (s < 1e-12);
  for (auto& v : d) v /= s;
  return d;
}

void require_dim(const Vector& x, Index d, const char* what) {
  if (x.size() != d)
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(d) + ", got " + std::to_string(x.size()));
}

}  // namespace

ConvexSet::ConvexSet(Node node, Index dim)
    : node_(std::make_shared<Node>(std::move(node))), dim_(dim) {}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) throw DimensionError("box: lo/hi dimension mismatch");
  for (Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]))
      throw InvalidInputError("box: lo must not exceed hi componentwise");
  const Index d = lo.size();
  return ConvexSet(Box{std::move(lo), std::move(hi)}, d);
}

ConvexSet ConvexSet::singleton(Vector point) {
  const Index d = point.size();
  return ConvexSet(Singleton{std::move(point)}, d);
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  if (norm(normal) <= 0.0)
    throw InvalidInputError("halfspace: normal must be nonzero");
  const Index d = normal.size();
  return ConvexSet(Halfspace{std::move(normal), offset}, d);
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (radius < 0.0) throw InvalidInputError("ball: negative radius");
  const Index d = center.size();
  return ConvexSet(Ball{std::move(center), radius}, d);
}

ConvexSet ConvexSet::shift(ConvexSet inner, Vector offset) {
  if (inner.dim() != offset.size())
    throw DimensionError("shift: offset dimension mismatch");
  const Index d = inner.dim();
  return ConvexSet(Shifted{std::make_shared<const ConvexSet>(std::move(inner)),
                           std::move(offset)},
                   d);
}

ConvexSet ConvexSet::product(std::vector<ConvexSet> factors) {
  Index d = 0;
  for (const auto& f : factors) d += f.dim();
  return ConvexSet(Product{std::move(factors)}, d);
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members) {
  if (members.empty()) throw InvalidInputError("intersection: no members");
  const Index d = members.front().dim();
  for (const auto& m : members)
    if (m.dim() != d) throw DimensionError("intersection: member dimensions differ");
  return ConvexSet(Intersection{std::move(members)}, d);
}

ConvexSet ConvexSet::whole_space(Index n) {
  return box(Vector(n, -kInf), Vector(n, kInf));
}

Vector ConvexSet::project(const Vector& x, double tol) const {
  require_dim(x, dim_, "project");
  if (const auto* b = std::get_if<Box>(node_.get())) {
    Vector p(x);
    for (Index i = 0; i < dim_; ++i) p[i] = std::min(std::max(p[i], b->lo[i]), b->hi[i]);
    return p;
  }
  if (const auto* s = std::get_if<Singleton>(node_.get())) return s->point;
  if (const auto* h = std::get_if<Halfspace>(node_.get())) {
    const double v = dot(h->normal, x) - h->offset;
    if (v <= 0.0) return x;
    Vector p(x);
    axpy(-v / norm_sq(h->normal), h->normal, p);
    return p;
  }
  if (const auto* b = std::get_if<Ball>(node_.get())) {
    Vector d = sub(x, b->center);
    const double n = norm(d);
    if (n <= b->radius) return x;
    Vector p(b->center);
    if (n > 0.0) axpy(b->radius / n, d, p);
    return p;
  }
  if (const auto* s = std::get_if<Shifted>(node_.get())) {
    Vector p = s->inner->project(sub(x, s->offset), tol);
    return add(p, s->offset);
  }
  if (const auto* p = std::get_if<Product>(node_.get())) {
    Vector out;
    out.reserve(dim_);
    Index off = 0;
    for (const auto& f : p->factors) {
      Vector slice(x.begin() + off, x.begin() + off + f.dim());
      Vector pf = f.project(slice, tol);
      out.insert(out.end(), pf.begin(), pf.end());
      off += f.dim();
    }
    return out;
  }
  // Intersection: Dykstra's alternating projections. For an inconsistent
  // (empty) intersection the sweeps can still settle, so membership in every
  // member is verified before returning.
  const auto& inter = std::get<Intersection>(*node_);
  const Index m = inter.members.size();
  Vector cur(x);
  std::vector<Vector> corrections(m, zeros(dim_));
  const int max_sweeps = 10000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Vector prev(cur);
    for (Index i = 0; i < m; ++i) {
      Vector y = add(cur, corrections[i]);
      Vector proj = inter.members[i].project(y, tol);
      corrections[i] = sub(y, proj);
      cur = std::move(proj);
    }
    if (norm(sub(cur, prev)) <= tol) {
      const double member_tol = std::max(100.0 * tol, 1e-9);
      for (const auto& member : inter.members)
        if (!member.contains(cur, member_tol))
          throw DykstraError(
              "Dykstra settled outside a member (intersection may be empty)", cur);
      return cur;
    }
  }
  throw DykstraError("Dykstra projection did not converge (intersection may be empty)",
                     cur);
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  return norm(sub(x, project(x, std::min(tol, 1e-12)))) <= tol;
}

std::optional<Vector> ConvexSet::singleton_point() const {
  if (const auto* s = std::get_if<Singleton>(node_.get())) return s->point;
  if (const auto* b = std::get_if<Ball>(node_.get()))
    if (b->radius == 0.0) return b->center;
  if (const auto* b = std::get_if<Box>(node_.get()))
    if (b->lo == b->hi) return b->lo;
  if (const auto* s = std::get_if<Shifted>(node_.get())) {
    auto p = s->inner->singleton_point();
    if (p) return add(*p, s->offset);
    return std::nullopt;
  }
  if (const auto* p = std::get_if<Product>(node_.get())) {
    Vector out;
    for (const auto& f : p->factors) {
      auto fp = f.singleton_point();
      if (!fp) return std::nullopt;
      out.insert(out.end(), fp->begin(), fp->end());
    }
    return out;
  }
  return std::nullopt;
}

void ConvexSet::bounding_box(Vector& lo, Vector& hi, const Vector& fallback_center) const {
  require_dim(fallback_center, dim_, "bounding_box");
  const double width = 32.0 * (1.0 + norm(fallback_center));
  if (const auto* b = std::get_if<Box>(node_.get())) {
    lo = b->lo;
    hi = b->hi;
    for (Index i = 0; i < dim_; ++i) {
      if (!std::isfinite(lo[i])) lo[i] = fallback_center[i] - width;
      if (!std::isfinite(hi[i])) hi[i] = fallback_center[i] + width;
    }
    return;
  }
  if (const auto* s = std::get_if<Singleton>(node_.get())) {
    lo = s->point;
    hi = s->point;
    return;
  }
  if (std::holds_alternative<Halfspace>(*node_)) {
    Vector c = project(fallback_center, 1e-12);
    lo.assign(dim_, 0.0);
    hi.assign(dim_, 0.0);
    for (Index i = 0; i < dim_; ++i) {
      lo[i] = c[i] - width;
      hi[i] = c[i] + width;
    }
    return;
  }
  if (const auto* b = std::get_if<Ball>(node_.get())) {
    lo.resize(dim_);
    hi.resize(dim_);
    for (Index i = 0; i < dim_; ++i) {
      lo[i] = b->center[i] - b->radius;
      hi[i] = b->center[i] + b->radius;
    }
    return;
  }
  if (const auto* s = std::get_if<Shifted>(node_.get())) {
    s->inner->bounding_box(lo, hi, sub(fallback_center, s->offset));
    for (Index i = 0; i < dim_; ++i) {
      lo[i] += s->offset[i];
      hi[i] += s->offset[i];
    }
    return;
  }
  if (const auto* p = std::get_if<Product>(node_.get())) {
    lo.clear();
    hi.clear();
    Index off = 0;
    for (const auto& f : p->factors) {
      Vector flo, fhi;
      Vector fc(fallback_center.begin() + off, fallback_center.begin() + off + f.dim());
      f.bounding_box(flo, fhi, fc);
      lo.insert(lo.end(), flo.begin(), flo.end());
      hi.insert(hi.end(), fhi.begin(), fhi.end());
      off += f.dim();
    }
    return;
  }
  const auto& inter = std::get<Intersection>(*node_);
  lo.assign(dim_, -kInf);
  hi.assign(dim_, kInf);
  for (const auto& m : inter.members) {
    Vector mlo, mhi;
    m.bounding_box(mlo, mhi, fallback_center);
    for (Index i = 0; i < dim_; ++i) {
      lo[i] = std::max(lo[i], mlo[i]);
      hi[i] = std::min(hi[i], mhi[i]);
    }
  }
  for (Index i = 0; i < dim_; ++i)
    if (lo[i] > hi[i]) std::swap(lo[i], hi[i]);
}

std::optional<Vector> ConvexSet::support_point(const Vector& d) const {
  require_dim(d, dim_, "support_point");
  if (const auto* b = std::get_if<Box>(node_.get())) {
    Vector p(dim_);
    for (Index i = 0; i < dim_; ++i) {
      const double v = d[i] > 0.0 ? b->hi[i] : (d[i] < 0.0 ? b->lo[i] : 0.0);
      if (!std::isfinite(v)) return std::nullopt;
      if (d[i] == 0.0) {
        // Any feasible coordinate works; take the closest to zero.
        p[i] = std::min(std::max(0.0, b->lo[i]), b->hi[i]);
      } else {
        p[i] = v;
      }
    }
    return p;
  }
  if (const auto* s = std::get_if<Singleton>(node_.get())) return s->point;
  if (const auto* b = std::get_if<Ball>(node_.get())) {
    const double n = norm(d);
    Vector p(b->center);
    if (n > 0.0) axpy(b->radius / n, d, p);
    return p;
  }
  if (const auto* s = std::get_if<Shifted>(node_.get())) {
    auto p = s->inner->support_point(d);
    if (!p) return std::nullopt;
    return add(*p, s->offset);
  }
  if (const auto* p = std::get_if<Product>(node_.get())) {
    Vector out;
    Index off = 0;
    for (const auto& f : p->factors) {
      Vector slice(d.begin() + off, d.begin() + off + f.dim());
      auto fp = f.support_point(slice);
      if (!fp) return std::nullopt;
      out.insert(out.end(), fp->begin(), fp->end());
      off += f.dim();
    }
    return out;
  }
  return std::nullopt;  // halfspace, intersection
}

std::vector<Vector> ConvexSet::normal_directions(const Vector& anchor, double tol) const {
  require_dim(anchor, dim_, "normal_directions");
  std::vector<Vector> out;
  if (const auto* b = std::get_if<Box>(node_.get())) {
    for (Index i = 0; i < dim_; ++i) {
      if (std::isfinite(b->lo[i]) && std::abs(anchor[i] - b->lo[i]) <= tol)
        out.push_back(scaled(unit(dim_, i), -1.0));
      if (std::isfinite(b->hi[i]) && std::abs(anchor[i] - b->hi[i]) <= tol)
        out.push_back(unit(dim_, i));
    }
    return out;
  }
  if (std::holds_alternative<Singleton>(*node_)) {
    for (Index i = 0; i < dim_; ++i) {
      out.push_back(unit(dim_, i));
      out.push_back(scaled(unit(dim_, i), -1.0));
    }
    return out;
  }
  if (const auto* h = std::get_if<Halfspace>(node_.get())) {
    const double nn = norm(h->normal);
    if (std::abs(dot(h->normal, anchor) - h->offset) <= tol * nn)
      out.push_back(scaled(h->normal, 1.0 / nn));
    return out;
  }
  if (const auto* b = std::get_if<Ball>(node_.get())) {
    if (b->radius == 0.0) {
      for (Index i = 0; i < dim_; ++i) {
        out.push_back(unit(dim_, i));
        out.push_back(scaled(unit(dim_, i), -1.0));
      }
      return out;
    }
    Vector d = sub(anchor, b->center);
    if (std::abs(norm(d) - b->radius) <= tol) out.push_back(scaled(d, 1.0 / norm(d)));
    return out;
  }
  if (const auto* s = std::get_if<Shifted>(node_.get()))
    return s->inner->normal_directions(sub(anchor, s->offset), tol);
  if (const auto* p = std::get_if<Product>(node_.get())) {
    Index off = 0;
    for (const auto& f : p->factors) {
      Vector slice(anchor.begin() + off, anchor.begin() + off + f.dim());
      for (const auto& n : f.normal_directions(slice, tol)) {
        Vector embedded = zeros(dim_);
        for (Index i = 0; i < f.dim(); ++i) embedded[off + i] = n[i];
        out.push_back(std::move(embedded));
      }
      off += f.dim();
    }
    return out;
  }
  const auto& inter = std::get<Intersection>(*node_);
  for (const auto& m : inter.members)
    for (auto& n : m.normal_directions(anchor, tol)) out.push_back(std::move(n));
  return out;
}

std::vector<Vector> sample_points(const ConvexSet& set, const SamplePlan& plan) {
  if (plan.count < 1) throw InvalidInputError("SamplePlan.count must be >= 1");
  const Index d = set.dim();
  std::mt19937_64 rng(plan.seed);
  Vector ref = set.project(zeros(d), 1e-10);
  Vector lo, hi;
  set.bounding_box(lo, hi, ref);
  static const double kScales[] = {2.0, 1.0, 0.5, 0.25, 0.125, 0.08, 0.05};

  std::vector<Vector> out;
  out.reserve(plan.count);
  for (int i = 0; i < plan.count; ++i) {
    if (plan.strategy == SamplePlan::Strategy::UniformProject) {
      Vector x(d);
      for (Index j = 0; j < d; ++j) x[j] = lo[j] + portable_u01(rng) * (hi[j] - lo[j]);
      out.push_back(set.project(x, 1e-10));
    } else {
      Vector dir = unit_direction(rng, d);
      const double s = kScales[i % 7] * (1.0 + norm(ref));
      Vector x(ref);
      axpy(s, dir, x);
      out.push_back(set.project(x, 1e-10));
    }
  }
  return out;
}

std::vector<Vector> anchored_samples(const ConvexSet& set, const Vector& anchor,
                                     const SamplePlan& plan) {
  const Index d = set.dim();
  std::mt19937_64 rng(plan.seed);
  std::vector<Vector> out;
  out.push_back(anchor);
  // Projections of anchor +- s e_i at a few scales.
  for (double s : {1.0, 0.1}) {
    for (Index i = 0; i < d; ++i) {
      Vector xp(anchor), xm(anchor);
      xp[i] += s;
      xm[i] -= s;
      out.push_back(set.project(xp, 1e-10));
      out.push_back(set.project(xm, 1e-10));
    }
  }
  // Boundary-biased points around the anchor. Absolute scales keep the
  // sample set translation-equivariant, which the surrogate KKT equivalence
  // relies on; the box pass below covers the set's global extent.
  static const double kScales[] = {2.0, 1.0, 0.5, 0.25, 0.125, 0.08, 0.05};
  const int biased = std::max(plan.count / 2, 8);
  for (int i = 0; i < biased; ++i) {
    Vector dir = unit_direction(rng, d);
    Vector x(anchor);
    axpy(kScales[i % 7], dir, x);
    out.push_back(set.project(x, 1e-10));
  }
  // Uniform box samples projected into the set.
  Vector lo, hi;
  set.bounding_box(lo, hi, anchor);
  const int uniform = std::max(plan.count - biased, 8);
  for (int i = 0; i < uniform; ++i) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x[j] = lo[j] + portable_u01(rng) * (hi[j] - lo[j]);
    out.push_back(set.project(x, 1e-10));
  }
  return out;
}

double normal_cone_residual(const ConvexSet& set, const Vector& anchor,
                            const Vector& lambda, const SamplePlan& plan) {
  require_dim(lambda, set.dim(), "normal_cone_residual");
  std::vector<Vector> samples = anchored_samples(set, anchor, plan);
  if (norm(lambda) > 0.0) {
    if (auto sp = set.support_point(lambda)) samples.push_back(std::move(*sp));
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& zeta : samples)
    worst = std::max(worst, dot(lambda, sub(zeta, anchor)));
  return worst;
}

}  // namespace almlab
