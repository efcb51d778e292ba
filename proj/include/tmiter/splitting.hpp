#pragma once

#include "tmiter/errors.hpp"
#include "tmiter/iterate.hpp"
#include "tmiter/rates.hpp"

#include <functional>
#include <limits>
#include <string>

namespace tmiter {

/// A maximally monotone operator A known through its resolvent
/// J_{gamma A} = (Id + gamma A)^{-1}.
struct MonotoneOp {
  std::string name;
  std::function<Vec(double gamma, const Vec& x)> prox;
};

/// A single-valued beta-cocoercive operator:
/// <x - y, Bx - By> >= beta ||Bx - By||^2.
struct CocoerciveOp {
  std::string name;
  std::function<Vec(const Vec& x)> eval;
  double beta_coco = std::numeric_limits<double>::infinity();
};

MonotoneOp zero_monotone();
/// Subdifferential of rho ||.||_1; resolvent is soft thresholding at rho*gamma.
MonotoneOp l1_monotone(double rho);
/// Normal cone of [lo, hi]; resolvent is the projection for every gamma.
MonotoneOp box_monotone(const Vec& lo, const Vec& hi);

CocoerciveOp zero_cocoercive();
/// Bx = diag .* x - b, the gradient of 1/2 x^T diag(d) x - b^T x, with
/// cocoercivity constant 1/max(diag). diag must be nonnegative.
CocoerciveOp quadratic_cocoercive(const Vec& diag, const Vec& b);

/// J_{gamma A}(x - gamma B x). Throws std::domain_error unless
/// 0 < gamma < 2 beta.
Vec forward_backward_map(const MonotoneOp& A, const CocoerciveOp& B,
                         double gamma, const Vec& x);

/// T_n = J_{gamma_n A}(Id - gamma_n B) as a mapping family with registered
/// fixed point z, a zero of A + B.
MappingFamily forward_backward_family(const MonotoneOp& A, const CocoerciveOp& B,
                                      RealSeq gamma, Vec z);

struct TfbProblem {
  MonotoneOp A;
  CocoerciveOp B;
  ParamSchedule schedule;  // must carry gamma
  Vec u;
  Vec x0;
  Vec z;  // registered zero of A + B
};

/// Validates step sizes and relaxation parameters up to `horizon` and
/// assembles the Tikhonov-Mann instance on R^dim.
ProblemInstance tfb_instance(const TfbProblem& problem, Index horizon);

IterationTrace run_tfb(const TfbProblem& problem, Index horizon,
                       RunOptions opts = {});

/// chi_T = max{N_Gamma, chi_gamma(2 M Gamma (k+1) - 1)}, then the general
/// rates. Throws ConfigError naming a missing condition.
RateBundle tfb_rates(const ParamSchedule& schedule, Index M);

/// Minimiser of rho ||x||_1 + 1/2 x^T diag(d) x - b^T x for d > 0:
/// z_i = soft(b_i, rho) / d_i.
Vec lasso_diagonal_solution(double rho, const Vec& diag, const Vec& b);

/// Minimiser of 1/2 x^T diag(d) x - b^T x over [lo, hi] for d > 0.
Vec box_quadratic_solution(const Vec& lo, const Vec& hi, const Vec& diag,
                           const Vec& b);

/// max over sampled pairs of ||Jx - Jy||^2 - <x - y, Jx - Jy>.
double firm_nonexpansiveness_excess(const MonotoneOp& A, double gamma,
                                    std::size_t dim, std::size_t samples,
                                    std::uint64_t seed = 0);

/// max over sampled pairs of beta ||Bx - By||^2 - <x - y, Bx - By>.
double cocoercivity_excess(const CocoerciveOp& B, std::size_t dim,
                           std::size_t samples, std::uint64_t seed = 0);

}  // namespace tmiter
