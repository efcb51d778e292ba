#include "tmiter/splitting.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tmiter {

MonotoneOp zero_monotone() {
  return {"zero", [](double, const Vec& x) { return x; }};
}

MonotoneOp l1_monotone(double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("l1 weight must be >= 0");
  return {"l1", [rho](double gamma, const Vec& x) -> Vec {
            const double thr = rho * gamma;
            return x.unaryExpr([thr](double v) { return soft_threshold(v, thr); });
          }};
}

MonotoneOp box_monotone(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box size mismatch");
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("box lower bound exceeds upper bound");
  }
  return {"box", [lo, hi](double, const Vec& x) -> Vec {
            return x.cwiseMax(lo).cwiseMin(hi);
          }};
}

CocoerciveOp zero_cocoercive() {
  return {"zero", [](const Vec& x) -> Vec { return Vec::Zero(x.size()); },
          std::numeric_limits<double>::infinity()};
}

CocoerciveOp quadratic_cocoercive(const Vec& diag, const Vec& b) {
  if (diag.size() != b.size()) throw std::invalid_argument("size mismatch");
  if ((diag.array() < 0.0).any()) {
    throw std::invalid_argument("quadratic diagonal must be nonnegative");
  }
  const double top = diag.size() > 0 ? diag.maxCoeff() : 0.0;
  const double beta = top > 0.0 ? 1.0 / top
                                : std::numeric_limits<double>::infinity();
  return {"quadratic",
          [diag, b](const Vec& x) -> Vec {
            return diag.cwiseProduct(x) - b;
          },
          beta};
}

Vec forward_backward_map(const MonotoneOp& A, const CocoerciveOp& B,
                         double gamma, const Vec& x) {
  if (!(gamma > 0.0 && gamma < 2.0 * B.beta_coco)) {
    throw std::domain_error("step size must lie in (0, 2*beta), got " +
                            std::to_string(gamma));
  }
  return A.prox(gamma, x - gamma * B.eval(x));
}

MappingFamily forward_backward_family(const MonotoneOp& A, const CocoerciveOp& B,
                                      RealSeq gamma, Vec z) {
  MappingFamily f;
  f.name = "forward_backward(" + A.name + "," + B.name + ")";
  f.kind = FamilyKind::Jp2WithGamma;
  f.eval = [A, B, gamma](Index n, const Point& x) -> Point {
    return forward_backward_map(A, B, gamma(n), std::get<Vec>(x));
  };
  f.fixed_point = std::move(z);
  f.gamma = std::move(gamma);
  return f;
}

ProblemInstance tfb_instance(const TfbProblem& problem, Index horizon) {
  const ParamSchedule& s = problem.schedule;
  if (!s.gamma) {
    throw ConfigError("forward-backward needs a step-size sequence gamma");
  }
  // T_{n+1} is evaluated alongside step n, so validate one index further.
  for (Index n = 0; n <= horizon + 1; ++n) {
    const double g = s.gamma->gamma(n);
    if (!(g > 0.0 && g < 2.0 * problem.B.beta_coco)) {
      throw ConfigError("gamma_" + std::to_string(n) + " = " +
                        std::to_string(g) + " outside (0, 2*beta)");
    }
    const double l = s.lambda(n);
    if (!(l > 0.0 && l <= 1.0)) {
      throw ConfigError("lambda_" + std::to_string(n) + " outside (0, 1]");
    }
  }
  const auto dim = static_cast<std::size_t>(problem.z.size());
  auto space = std::make_shared<EuclideanSpace>(dim);
  return make_instance(space,
                       forward_backward_family(problem.A, problem.B,
                                               s.gamma->gamma, problem.z),
                       s, problem.u, problem.x0, Point(problem.z),
                       std::nullopt, std::min<Index>(horizon, 1000));
}

IterationTrace run_tfb(const TfbProblem& problem, Index horizon,
                       RunOptions opts) {
  return run_tikhonov_mann(tfb_instance(problem, horizon), horizon, opts);
}

RateBundle tfb_rates(const ParamSchedule& schedule, Index M) {
  if (!schedule.gamma) {
    throw ConfigError("schedule '" + schedule.name +
                      "' has no step sizes gamma with a Cauchy modulus and lower bound");
  }
  const GammaData& g = *schedule.gamma;
  const RateFn chi_T = chi_T_from_gamma(M, g.gamma_cap, g.n_gamma, g.chi_gamma);
  return general_rates(schedule, chi_T, M);
}

Vec lasso_diagonal_solution(double rho, const Vec& diag, const Vec& b) {
  if ((diag.array() <= 0.0).any()) {
    throw std::invalid_argument("diagonal must be strictly positive");
  }
  return b.unaryExpr([rho](double v) { return soft_threshold(v, rho); })
      .cwiseQuotient(diag);
}

Vec box_quadratic_solution(const Vec& lo, const Vec& hi, const Vec& diag,
                           const Vec& b) {
  if ((diag.array() <= 0.0).any()) {
    throw std::invalid_argument("diagonal must be strictly positive");
  }
  return b.cwiseQuotient(diag).cwiseMax(lo).cwiseMin(hi);
}

namespace {

Vec random_vec(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  Vec v(static_cast<Eigen::Index>(dim));
  for (auto& c : v) c = coord(rng);
  return v;
}

}  // namespace

double firm_nonexpansiveness_excess(const MonotoneOp& A, double gamma,
                                    std::size_t dim, std::size_t samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec x = random_vec(rng, dim);
    const Vec y = random_vec(rng, dim);
    const Vec d = A.prox(gamma, x) - A.prox(gamma, y);
    worst = std::max(worst, d.squaredNorm() - (x - y).dot(d));
  }
  return worst;
}

double cocoercivity_excess(const CocoerciveOp& B, std::size_t dim,
                           std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec x = random_vec(rng, dim);
    const Vec y = random_vec(rng, dim);
    const Vec d = B.eval(x) - B.eval(y);
    const double lhs = std::isinf(B.beta_coco) ? 0.0 : B.beta_coco * d.squaredNorm();
    worst = std::max(worst, lhs - (x - y).dot(d));
  }
  return worst;
}

}  // namespace tmiter
