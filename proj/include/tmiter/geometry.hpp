#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace tmiter {

/// A point of a star-shaped R-tree: `t` units out along ray `ray`. The
/// origin is the single point shared by every ray and is stored as
/// (ray 0, t 0).
struct TreePoint {
  std::size_t ray = 0;
  double t = 0.0;

  static TreePoint origin() { return {}; }
  static TreePoint make(std::size_t ray, double t);

  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

using Vec = Eigen::VectorXd;
using Point = std::variant<Vec, TreePoint>;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Metric space with a convex-combination map W, i.e. a W-space. The
/// W-hyperbolic axioms are not enforced by the type; check_w_axioms()
/// verifies them on samples.
class Space {
 public:
  virtual ~Space() = default;

  virtual std::string name() const = 0;
  virtual double dist(const Point& x, const Point& y) const = 0;
  /// W(x, y, lambda) = (1 - lambda) x + lambda y.
  virtual Point combine(const Point& x, const Point& y, double lambda) const = 0;
  /// Uniform sample from the configured bounded region.
  virtual Point sample(std::mt19937_64& rng) const = 0;
  /// Throws GeometryError if `x` is not a point of this space.
  virtual void validate(const Point& x) const = 0;
};

using SpacePtr = std::shared_ptr<const Space>;

/// R^dim with the Euclidean norm. Samples uniformly from [-box, box]^dim.
class EuclideanSpace final : public Space {
 public:
  EuclideanSpace(std::size_t dim, double box = 10.0);

  std::string name() const override;
  double dist(const Point& x, const Point& y) const override;
  Point combine(const Point& x, const Point& y, double lambda) const override;
  Point sample(std::mt19937_64& rng) const override;
  void validate(const Point& x) const override;

  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  double box_;
};

/// Star tree with `rays` half-lines glued at the origin. Distances: |s - t|
/// on a common ray, s + t across rays. Samples a uniform ray and a uniform
/// radius in [0, radius].
class StarTreeSpace final : public Space {
 public:
  StarTreeSpace(std::size_t rays, double radius = 10.0);

  std::string name() const override;
  double dist(const Point& x, const Point& y) const override;
  Point combine(const Point& x, const Point& y, double lambda) const override;
  Point sample(std::mt19937_64& rng) const override;
  void validate(const Point& x) const override;

  std::size_t rays() const { return rays_; }

 private:
  std::size_t rays_;
  double radius_;
};

/// Test fixture: the real line with W(x, y, l) = x + l^2 (y - x). It is a
/// metric space but violates (W2); used to exercise failure reporting.
class BrokenLineSpace final : public Space {
 public:
  explicit BrokenLineSpace(double box = 10.0) : box_(box) {}

  std::string name() const override { return "broken_line"; }
  double dist(const Point& x, const Point& y) const override;
  Point combine(const Point& x, const Point& y, double lambda) const override;
  Point sample(std::mt19937_64& rng) const override;
  void validate(const Point& x) const override;

 private:
  double box_;
};

/// Free-function forms of the two primitive operations.
inline double dist(const Space& s, const Point& x, const Point& y) {
  return s.dist(x, y);
}
inline Point combine(const Space& s, const Point& x, const Point& y,
                     double lambda) {
  return s.combine(x, y, lambda);
}

enum class Axiom : std::size_t {
  W1,
  W2,
  W3,
  W4,
  EndpointLeft,   // d(x, W(x,y,l)) = l d(x,y)
  EndpointRight,  // d(y, W(x,y,l)) = (1-l) d(x,y)
  General,        // d(W(x,z,l), W(y,w,t)) <= (1-l)d(x,y) + l d(z,w) + |l-t| d(y,w)
  CommonLeft,     // d(W(x,z,l), W(x,w,t)) <= l d(z,w) + |l-t| d(x,w)
};

inline constexpr std::size_t kAxiomCount = 8;

std::string_view axiom_name(Axiom a);

/// Per-axiom violation for one tuple. Equalities report |lhs - rhs|,
/// inequalities report max(0, lhs - rhs).
using AxiomViolations = std::array<double, kAxiomCount>;

AxiomViolations axiom_violations(const Space& s, const Point& x, const Point& y,
                                 const Point& z, const Point& w, double lambda,
                                 double theta);

struct AxiomReport {
  std::size_t samples = 0;
  double tol = 0.0;
  AxiomViolations max_violation{};

  bool passed(Axiom a) const {
    return max_violation[static_cast<std::size_t>(a)] <= tol;
  }
  bool passed() const;
};

/// Draws `samples` random tuples (x, y, z, w, lambda, theta) and records
/// the worst violation of each axiom.
AxiomReport check_w_axioms(const Space& s, std::size_t samples, double tol,
                           std::uint64_t seed = 0);

}  // namespace tmiter
