#pragma once

#include "tmiter/rate_fn.hpp"
#include "tmiter/sequences.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tmiter {

enum class RateProvenance {
  GeneralTheorem,
  ExampleClosedForm,
  LinearTheorem,
  HalpernTranslated,
};

std::string_view provenance_name(RateProvenance p);

using Psi0Fn = std::function<Index(Index)>;

struct RateBundle {
  RateFn chi_T;
  RateFn chi;    // combined Cauchy modulus of sum c_n
  Psi0Fn psi0;
  RateFn Sigma;  // asymptotic regularity: d(x_n, x_{n+1})
  std::optional<RateFn> Sigma_T;  // (T_n)-asymptotic regularity
  RateProvenance provenance = RateProvenance::GeneralTheorem;
};

/// k -> max{chi_T(2(k+1)-1), chi_lambda(8M(k+1)-1), chi_beta(8M(k+1)-1)}.
RateFn chi_combined(const RateFn& chi_T, const RateFn& chi_lambda,
                    const RateFn& chi_beta, Index M);

/// k -> max{sigma_beta(6M(k+1) psi0(k) - 1), chi(3k+2) + 1} + 1.
RateFn sigma_ar(const RateFn& sigma_beta, const RateFn& chi, Psi0Fn psi0,
                Index M);

/// Turns a rate of asymptotic regularity phi into a rate of (T_n)-asymptotic
/// regularity: k -> max{N_Lambda, phi(2 Lambda (k+1) - 1),
/// sigma(4 M Lambda (k+1) - 1)}.
RateFn translate_ar_to_tn_ar(const RateFn& phi, Index M, Index lambda_cap,
                             Index n_lambda, const RateFn& sigma);

/// The psi0 function the schedule's policy selects, given the combined chi.
Psi0Fn psi0_for(const ParamSchedule& schedule, const RateFn& chi);

/// Composes chi, psi0, Sigma and (when sigma and Lambda exist) Sigma_T from a
/// schedule and a modulus chi_T.
RateBundle general_rates(const ParamSchedule& schedule, const RateFn& chi_T,
                         Index M);

/// 144 M^2 (k+1)^2 - 6 M (k+1).
RateFn example_sigma_closed_form(Index M);

/// 576 M^2 Lambda^2 (k+1)^2 - 12 M Lambda (k+1).
RateFn example_sigma_t_closed_form(Index M, Index lambda_cap);

/// Rates and pointwise bounds under beta_n = 1 - 2/(n+2), lambda_n = lambda.
struct LinearRates {
  Index M = 1;
  double lambda = 0.5;
  Index lambda_cap = 2;

  RateFn ar;     // 6M(k+1) - 2
  RateFn tn_ar;  // 10M Lambda (k+1) - 2
  RateFn tm_ar;  // 20M Lambda (k+1) - 2

  double step_bound(Index n) const;   // 6M/(n+2)
  double tn_bound(Index n) const;     // 10M/(lambda(n+2))
  double cross_bound(Index n) const;  // 20M/(lambda(n+2))
};

LinearRates linear_rates(Index M, double lambda_const);

/// k -> max{alpha(3k+2), Sigma(3k+2)} with alpha(k) = sigma(2M(k+1) - 1):
/// moves a rate between the Tikhonov-Mann and modified Halpern orbits.
RateFn halpern_translate(const RateFn& Sigma, const RateFn& sigma, Index M);

/// Verifies, for a_n = 2/(n+2):
///   hypothesis  s_0 <= L and s_{n+1} <= (1 - a_{n+1}) s_n + (a_n - a_{n+1}) L
///   conclusion  s_n <= 2L/(n+2)
/// for every index with data up to `horizon`. Failures are reported by the
/// index of the offending s-term.
struct SabachShternReport {
  bool hypothesis_holds = true;
  std::optional<Index> hypothesis_failure;
  bool conclusion_holds = true;
  std::optional<Index> conclusion_failure;
  double max_hypothesis_excess = 0.0;
  double max_conclusion_excess = 0.0;
};

SabachShternReport sabach_shtern_check(std::span<const double> s, double L,
                                       Index horizon, double tol);

enum class CertStatus { Pass, Fail, Inconclusive };

std::string_view cert_status_name(CertStatus s);

struct CertEntry {
  Index k = 0;
  Index rate_k = 0;
  /// max over n in [rate(k), horizon] of residual[n] - 1/(k+1).
  double worst_excess = 0.0;
  /// Least N with residual[n] <= 1/(k+1) + tol for all n in [N, horizon].
  Index minimal_empirical_index = 0;
  CertStatus status = CertStatus::Inconclusive;
};

struct CertificationReport {
  std::string rate_name;
  std::vector<CertEntry> entries;
  bool any_failure() const;
  bool all_pass() const;
};

/// For each k <= k_max: pass iff residuals[n] <= 1/(k+1) + tol for all n in
/// [rate(k), horizon]; inconclusive when rate(k) > horizon. `horizon` must
/// index into `residuals`.
CertificationReport certify_rate(std::span<const double> residuals,
                                 const RateFn& rate, Index k_max, Index horizon,
                                 double tol = 1e-12,
                                 std::string rate_name = "rate");

}  // namespace tmiter
