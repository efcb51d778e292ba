#include "tmiter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tmiter {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("combination parameter must lie in [0, 1], got " +
                            std::to_string(lambda));
  }
}

const Vec& as_vec(const Point& p) {
  const auto* v = std::get_if<Vec>(&p);
  if (v == nullptr) throw GeometryError("expected a Euclidean point");
  return *v;
}

const TreePoint& as_tree(const Point& p) {
  const auto* v = std::get_if<TreePoint>(&p);
  if (v == nullptr) throw GeometryError("expected a star-tree point");
  return *v;
}

}  // namespace

TreePoint TreePoint::make(std::size_t ray, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw GeometryError("star-tree radius must be finite and >= 0");
  }
  if (t == 0.0) return origin();
  if (ray == 0) throw GeometryError("ray index 0 is reserved for the origin");
  return {ray, t};
}

// ---------------------------------------------------------------- Euclidean

EuclideanSpace::EuclideanSpace(std::size_t dim, double box)
    : dim_(dim), box_(box) {
  if (dim == 0) throw GeometryError("Euclidean dimension must be >= 1");
  if (!(box > 0.0)) throw GeometryError("sampling box must be positive");
}

std::string EuclideanSpace::name() const {
  return "euclidean(" + std::to_string(dim_) + ")";
}

void EuclideanSpace::validate(const Point& x) const {
  const Vec& v = as_vec(x);
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw GeometryError("dimension mismatch: expected " + std::to_string(dim_) +
                        ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw GeometryError("non-finite coordinate");
}

double EuclideanSpace::dist(const Point& x, const Point& y) const {
  const Vec& a = as_vec(x);
  const Vec& b = as_vec(y);
  if (a.size() != b.size()) throw GeometryError("dimension mismatch");
  return (a - b).norm();
}

Point EuclideanSpace::combine(const Point& x, const Point& y,
                              double lambda) const {
  check_lambda(lambda);
  const Vec& a = as_vec(x);
  const Vec& b = as_vec(y);
  if (a.size() != b.size()) throw GeometryError("dimension mismatch");
  return Vec((1.0 - lambda) * a + lambda * b);
}

Point EuclideanSpace::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> coord(-box_, box_);
  Vec v(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = coord(rng);
  return v;
}

// ---------------------------------------------------------------- star tree

StarTreeSpace::StarTreeSpace(std::size_t rays, double radius)
    : rays_(rays), radius_(radius) {
  if (rays < 1) throw GeometryError("star tree needs at least one ray");
  if (!(radius > 0.0)) throw GeometryError("sampling radius must be positive");
}

std::string StarTreeSpace::name() const {
  return "star_tree(" + std::to_string(rays_) + ")";
}

void StarTreeSpace::validate(const Point& x) const {
  const TreePoint& p = as_tree(x);
  if (!(p.t >= 0.0) || !std::isfinite(p.t)) {
    throw GeometryError("star-tree radius must be finite and >= 0");
  }
  if (p.t == 0.0 && p.ray != 0) {
    throw GeometryError("origin must be stored with ray index 0");
  }
  if (p.t > 0.0 && (p.ray == 0 || p.ray > rays_)) {
    throw GeometryError("ray index " + std::to_string(p.ray) +
                        " outside 1.." + std::to_string(rays_));
  }
}

double StarTreeSpace::dist(const Point& x, const Point& y) const {
  const TreePoint& a = as_tree(x);
  const TreePoint& b = as_tree(y);
  if (a.ray == b.ray || a.t == 0.0 || b.t == 0.0) return std::abs(a.t - b.t);
  return a.t + b.t;
}

Point StarTreeSpace::combine(const Point& x, const Point& y,
                             double lambda) const {
  check_lambda(lambda);
  const TreePoint& a = as_tree(x);
  const TreePoint& b = as_tree(y);
  if (a.t == 0.0) return TreePoint::make(b.ray, lambda * b.t);
  if (b.t == 0.0) return TreePoint::make(a.ray, (1.0 - lambda) * a.t);
  if (a.ray == b.ray) {
    return TreePoint::make(a.ray, (1.0 - lambda) * a.t + lambda * b.t);
  }
  // Geodesic runs through the origin; walk lambda*(s+t) from x.
  const double walked = lambda * (a.t + b.t);
  if (walked <= a.t) return TreePoint::make(a.ray, a.t - walked);
  return TreePoint::make(b.ray, walked - a.t);
}

Point StarTreeSpace::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::size_t> ray(1, rays_);
  std::uniform_real_distribution<double> radius(0.0, radius_);
  const std::size_t r = ray(rng);
  return TreePoint::make(r, radius(rng));
}

// ---------------------------------------------------------------- broken line

void BrokenLineSpace::validate(const Point& x) const {
  const Vec& v = as_vec(x);
  if (v.size() != 1) throw GeometryError("broken_line points are 1-dimensional");
  if (!v.allFinite()) throw GeometryError("non-finite coordinate");
}

double BrokenLineSpace::dist(const Point& x, const Point& y) const {
  return std::abs(as_vec(x)[0] - as_vec(y)[0]);
}

Point BrokenLineSpace::combine(const Point& x, const Point& y,
                               double lambda) const {
  check_lambda(lambda);
  const double a = as_vec(x)[0];
  const double b = as_vec(y)[0];
  Vec r(1);
  r[0] = a + lambda * lambda * (b - a);
  return r;
}

Point BrokenLineSpace::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> coord(-box_, box_);
  Vec v(1);
  v[0] = coord(rng);
  return v;
}

// ---------------------------------------------------------------- axioms

std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::W1: return "W1";
    case Axiom::W2: return "W2";
    case Axiom::W3: return "W3";
    case Axiom::W4: return "W4";
    case Axiom::EndpointLeft: return "endpoint_left";
    case Axiom::EndpointRight: return "endpoint_right";
    case Axiom::General: return "general";
    case Axiom::CommonLeft: return "common_left";
  }
  return "?";
}

AxiomViolations axiom_violations(const Space& s, const Point& x, const Point& y,
                                 const Point& z, const Point& w, double lambda,
                                 double theta) {
  const auto excess = [](double lhs, double rhs) {
    return std::max(0.0, lhs - rhs);
  };
  const double l = lambda;
  const double t = theta;
  const double dxy = s.dist(x, y);
  const Point wxy_l = s.combine(x, y, l);
  const Point wxy_t = s.combine(x, y, t);

  AxiomViolations v{};
  auto at = [&v](Axiom a) -> double& { return v[static_cast<std::size_t>(a)]; };

  at(Axiom::W1) = excess(s.dist(z, wxy_l),
                         (1 - l) * s.dist(z, x) + l * s.dist(z, y));
  at(Axiom::W2) = std::abs(s.dist(wxy_l, wxy_t) - std::abs(l - t) * dxy);
  at(Axiom::W3) = s.dist(wxy_l, s.combine(y, x, 1 - l));
  at(Axiom::W4) = excess(s.dist(s.combine(x, z, l), s.combine(y, w, l)),
                         (1 - l) * dxy + l * s.dist(z, w));
  at(Axiom::EndpointLeft) = std::abs(s.dist(x, wxy_l) - l * dxy);
  at(Axiom::EndpointRight) = std::abs(s.dist(y, wxy_l) - (1 - l) * dxy);
  at(Axiom::General) =
      excess(s.dist(s.combine(x, z, l), s.combine(y, w, t)),
             (1 - l) * dxy + l * s.dist(z, w) + std::abs(l - t) * s.dist(y, w));
  at(Axiom::CommonLeft) =
      excess(s.dist(s.combine(x, z, l), s.combine(x, w, t)),
             l * s.dist(z, w) + std::abs(l - t) * s.dist(x, w));
  return v;
}

bool AxiomReport::passed() const {
  return std::all_of(max_violation.begin(), max_violation.end(),
                     [this](double v) { return v <= tol; });
}

AxiomReport check_w_axioms(const Space& s, std::size_t samples, double tol,
                           std::uint64_t seed) {
  AxiomReport report;
  report.samples = samples;
  report.tol = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const Point x = s.sample(rng);
    const Point y = s.sample(rng);
    const Point z = s.sample(rng);
    const Point w = s.sample(rng);
    const double lambda = unit(rng);
    const double theta = unit(rng);
    const AxiomViolations v = axiom_violations(s, x, y, z, w, lambda, theta);
    for (std::size_t a = 0; a < kAxiomCount; ++a) {
      report.max_violation[a] = std::max(report.max_violation[a], v[a]);
    }
  }
  return report;
}

}  // namespace tmiter
