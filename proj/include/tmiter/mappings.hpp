#pragma once

#include "tmiter/geometry.hpp"
#include "tmiter/rate_fn.hpp"
#include "tmiter/sequences.hpp"

#include <functional>
#include <optional>
#include <string>

namespace tmiter {

enum class FamilyKind {
  Constant,      // T_n = T for all n
  Jp2WithGamma,  // satisfies d(T_m x, T_n x) <= |g_m - g_n|/g_n d(T_n x, x)
  Resolvent,     // T_n = J_{g_n A}; a special case of Jp2WithGamma
  Custom,        // no certificate; chi_T can only be checked along a trace
};

std::string_view family_kind_name(FamilyKind k);

/// An indexed family (T_n) of nonexpansive self-maps with a registered
/// common fixed point.
struct MappingFamily {
  using Eval = std::function<Point(Index, const Point&)>;

  std::string name;
  FamilyKind kind = FamilyKind::Custom;
  Eval eval;
  Point fixed_point;
  /// The gamma sequence the jP2-consequence certificate refers to.
  std::optional<RealSeq> gamma;
  /// A declared Cauchy modulus for sum d(T_{n+1} u_n, T_n u_n), if known
  /// independently of the schedule.
  std::optional<RateFn> chi_T;

  Point operator()(Index n, const Point& x) const { return eval(n, x); }
};

inline Point eval(const MappingFamily& f, Index n, const Point& x) {
  return f.eval(n, x);
}

// Constructors addressable from experiment configs.

/// T_n = Id with the given registered fixed point.
MappingFamily identity_family(Point fixed_point);

/// Euclidean projection onto [lo, hi] (componentwise), constant family.
/// The registered fixed point is the projection of the origin.
MappingFamily box_projection_family(const Vec& lo, const Vec& hi);

/// Star tree: (ray i, t) -> (ray i, c t), constant family fixing the origin.
MappingFamily tree_contraction_family(double c);

/// Star tree: resolvent of f(x) = d(x, origin) with parameter gamma_n,
/// (ray i, t) -> (ray i, max(t - gamma_n, 0)).
MappingFamily tree_radial_resolvent_family(RealSeq gamma);

/// R^dim: J_{gamma_n A} for A the subdifferential of rho*||.||_1, i.e.
/// componentwise soft thresholding at rho*gamma_n.
MappingFamily resolvent_l1_family(std::size_t dim, RealSeq gamma,
                                  double rho = 1.0);

/// R^dim: J_{gamma_n Q} = (I + gamma_n Q)^{-1} for a symmetric positive
/// semidefinite Q.
MappingFamily resolvent_quadratic_family(const Eigen::MatrixXd& Q,
                                         RealSeq gamma);

double soft_threshold(double x, double threshold);

struct NonexpansiveReport {
  double max_excess = 0.0;  // max of d(T_n x, T_n y) - d(x, y)
  Index worst_n = 0;
  double tol = 0.0;
  bool passed() const { return max_excess <= tol; }
};

NonexpansiveReport check_nonexpansive(const MappingFamily& family,
                                      const Space& space, std::size_t samples,
                                      Index n_max, double tol,
                                      std::uint64_t seed = 0);

struct Jp2Report {
  double max_violation = 0.0;
  Index worst_m = 0;
  Index worst_n = 0;
  double tol = 0.0;
  bool passed() const { return max_violation <= tol; }
};

/// Checks d(T_m x, T_n x) <= |gamma_m - gamma_n| / gamma_n * d(T_n x, x) on
/// `samples` random points, each against `index_pairs` random pairs drawn
/// from [0, n_max]. Both orders (m, n) and (n, m) are checked.
Jp2Report check_jp2_consequence(const MappingFamily& family,
                                const RealSeq& gamma, const Space& space,
                                std::size_t samples, std::size_t index_pairs,
                                double tol, Index n_max = 1000,
                                std::uint64_t seed = 0);

struct FixedPointReport {
  double max_displacement = 0.0;  // max_n d(T_n p, p)
  double tol = 0.0;
  bool passed() const { return max_displacement <= tol; }
};

FixedPointReport check_fixed_point(const MappingFamily& family,
                                   const Space& space, const Point& p,
                                   Index n_max, double tol);

/// k -> max{N_Gamma, chi_gamma(2 M Gamma (k+1) - 1)}: a Cauchy modulus
/// of sum d(T_{n+1} u_n, T_n u_n) for any family satisfying the jP2
/// consequence w.r.t. gamma.
RateFn chi_T_from_gamma(Index M, Index gamma_cap, Index n_gamma,
                        RateFn chi_gamma);

/// k -> 0, valid for constant families.
RateFn constant_family_chi_T();

}  // namespace tmiter
