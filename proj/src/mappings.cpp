#include "tmiter/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace tmiter {

std::string_view family_kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Constant: return "constant";
    case FamilyKind::Jp2WithGamma: return "jp2_with_gamma";
    case FamilyKind::Resolvent: return "resolvent";
    case FamilyKind::Custom: return "custom";
  }
  return "?";
}

double soft_threshold(double x, double threshold) {
  if (x > threshold) return x - threshold;
  if (x < -threshold) return x + threshold;
  return 0.0;
}

MappingFamily identity_family(Point fixed_point) {
  MappingFamily f;
  f.name = "identity";
  f.kind = FamilyKind::Constant;
  f.eval = [](Index, const Point& x) { return x; };
  f.fixed_point = std::move(fixed_point);
  f.chi_T = constant_family_chi_T();
  return f;
}

MappingFamily box_projection_family(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("box bounds must have equal, nonzero size");
  }
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("box lower bound exceeds upper bound");
  }
  MappingFamily f;
  f.name = "box_projection";
  f.kind = FamilyKind::Constant;
  f.eval = [lo, hi](Index, const Point& x) -> Point {
    const Vec& v = std::get<Vec>(x);
    if (v.size() != lo.size()) throw GeometryError("dimension mismatch");
    return Vec(v.cwiseMax(lo).cwiseMin(hi));
  };
  f.fixed_point = Vec(Vec::Zero(lo.size()).cwiseMax(lo).cwiseMin(hi));
  f.chi_T = constant_family_chi_T();
  return f;
}

MappingFamily tree_contraction_family(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("tree contraction factor must lie in [0, 1]");
  }
  MappingFamily f;
  f.name = "tree_contraction";
  f.kind = FamilyKind::Constant;
  f.eval = [c](Index, const Point& x) -> Point {
    const TreePoint& p = std::get<TreePoint>(x);
    return TreePoint::make(p.ray, c * p.t);
  };
  f.fixed_point = TreePoint::origin();
  f.chi_T = constant_family_chi_T();
  return f;
}

MappingFamily tree_radial_resolvent_family(RealSeq gamma) {
  MappingFamily f;
  f.name = "tree_radial_resolvent";
  f.kind = FamilyKind::Resolvent;
  f.eval = [gamma](Index n, const Point& x) -> Point {
    const TreePoint& p = std::get<TreePoint>(x);
    return TreePoint::make(p.ray, std::max(p.t - gamma(n), 0.0));
  };
  f.fixed_point = TreePoint::origin();
  f.gamma = std::move(gamma);
  return f;
}

MappingFamily resolvent_l1_family(std::size_t dim, RealSeq gamma, double rho) {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!(rho >= 0.0)) throw std::invalid_argument("l1 weight must be >= 0");
  MappingFamily f;
  f.name = "resolvent_l1";
  f.kind = FamilyKind::Resolvent;
  f.eval = [gamma, rho](Index n, const Point& x) -> Point {
    const double thr = rho * gamma(n);
    return Vec(std::get<Vec>(x).unaryExpr(
        [thr](double v) { return soft_threshold(v, thr); }));
  };
  f.fixed_point = Vec(Vec::Zero(static_cast<Eigen::Index>(dim)));
  f.gamma = std::move(gamma);
  return f;
}

MappingFamily resolvent_quadratic_family(const Eigen::MatrixXd& Q,
                                         RealSeq gamma) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) {
    throw std::invalid_argument("Q must be a nonempty square matrix");
  }
  if (!Q.isApprox(Q.transpose(), 1e-12)) {
    throw std::invalid_argument("Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("Q must be positive semidefinite");
  }
  MappingFamily f;
  f.name = "resolvent_quadratic";
  f.kind = FamilyKind::Resolvent;
  // (I + g Q)^{-1} x = V diag(1/(1 + g e_i)) V^T x
  const Eigen::MatrixXd V = eig.eigenvectors();
  const Vec e = eig.eigenvalues();
  f.eval = [V, e, gamma](Index n, const Point& x) -> Point {
    const Vec& v = std::get<Vec>(x);
    if (v.size() != V.rows()) throw GeometryError("dimension mismatch");
    const double g = gamma(n);
    const Vec scale = (1.0 + g * e.array()).inverse().matrix();
    return Vec(V * scale.asDiagonal() * (V.transpose() * v));
  };
  f.fixed_point = Vec(Vec::Zero(Q.rows()));
  f.gamma = std::move(gamma);
  return f;
}

NonexpansiveReport check_nonexpansive(const MappingFamily& family,
                                      const Space& space, std::size_t samples,
                                      Index n_max, double tol,
                                      std::uint64_t seed) {
  NonexpansiveReport r;
  r.tol = tol;
  r.max_excess = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> index(0, n_max);
  for (std::size_t i = 0; i < samples; ++i) {
    const Index n = index(rng);
    const Point x = space.sample(rng);
    const Point y = space.sample(rng);
    const double excess =
        space.dist(family(n, x), family(n, y)) - space.dist(x, y);
    if (excess > r.max_excess) {
      r.max_excess = excess;
      r.worst_n = n;
    }
  }
  if (samples == 0) r.max_excess = 0.0;
  return r;
}

Jp2Report check_jp2_consequence(const MappingFamily& family,
                                const RealSeq& gamma, const Space& space,
                                std::size_t samples, std::size_t index_pairs,
                                double tol, Index n_max, std::uint64_t seed) {
  Jp2Report r;
  r.tol = tol;
  r.max_violation = 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> index(0, n_max);
  auto violation = [&](const Point& x, Index m, Index n) {
    const Point tn = family(n, x);
    const double lhs = space.dist(family(m, x), tn);
    const double rhs =
        std::abs(gamma(m) - gamma(n)) / gamma(n) * space.dist(tn, x);
    return lhs - rhs;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const Point x = space.sample(rng);
    for (std::size_t j = 0; j < index_pairs; ++j) {
      const Index a = index(rng);
      const Index b = index(rng);
      for (auto [m, n] : {std::pair{a, b}, std::pair{b, a}}) {
        const double v = violation(x, m, n);
        if (v > r.max_violation) {
          r.max_violation = v;
          r.worst_m = m;
          r.worst_n = n;
        }
      }
    }
  }
  return r;
}

FixedPointReport check_fixed_point(const MappingFamily& family,
                                   const Space& space, const Point& p,
                                   Index n_max, double tol) {
  FixedPointReport r;
  r.tol = tol;
  for (Index n = 0; n <= n_max; ++n) {
    r.max_displacement = std::max(r.max_displacement, space.dist(family(n, p), p));
  }
  return r;
}

RateFn chi_T_from_gamma(Index M, Index gamma_cap, Index n_gamma,
                        RateFn chi_gamma) {
  if (M < 1 || gamma_cap < 1) {
    throw std::domain_error("chi_T_from_gamma needs M >= 1 and Gamma >= 1");
  }
  const std::string label = "max{" + std::to_string(n_gamma) + ", chi_gamma(2*" +
                            std::to_string(M) + "*" + std::to_string(gamma_cap) +
                            "(k+1)-1)}";
  return RateFn(
      [=](Index k) {
        const Index arg = checked::pred(
            checked::mul(checked::mul(checked::mul(2, M), gamma_cap), checked::add(k, 1)));
        return std::max(n_gamma, chi_gamma(arg));
      },
      label);
}

RateFn constant_family_chi_T() { return RateFn::constant(0); }

}  // namespace tmiter
