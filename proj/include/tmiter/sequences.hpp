#pragma once

#include "tmiter/rate_fn.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tmiter {

using RealSeq = std::function<double(Index)>;

/// How the lower bound psi0 of the theorem on general rates is obtained.
enum class Psi0Policy {
  /// Least P with 1/P <= prod_{n=0}^{chi(3k+2)} beta_{n+1}, by evaluation.
  MinimalProduct,
  /// psi0(k) = chi(3k+2): the closed-form choice used for the
  /// beta_n = 1 - 1/(n+1) schedule.
  ChiAt3kPlus2,
};

/// Quantitative data for the step-size sequence gamma: a Cauchy
/// modulus for sum |gamma_{n+1} - gamma_n| and the lower bound
/// gamma_n >= 1/Gamma for n >= N_Gamma.
struct GammaData {
  RealSeq gamma;
  RateFn chi_gamma;
  Index gamma_cap = 1;  // Gamma
  Index n_gamma = 0;    // N_Gamma
};

/// Scalar parameter sequences of the iteration together with their declared
/// moduli. The moduli are data: the rate theorems consume them as given.
struct ParamSchedule {
  std::string name;

  RealSeq beta;
  RealSeq lambda;
  /// Number of defined terms for table schedules; nullopt for infinite ones.
  std::optional<Index> length;

  RateFn sigma_beta;  // prod beta_{n+1} -> 0
  RateFn chi_beta;    // sum |beta_{n+1} - beta_n|
  RateFn chi_lambda;  // sum |lambda_{n+1} - lambda_n|

  std::optional<RateFn> sigma;  // beta_n -> 1
  std::optional<Index> lambda_cap;  // lambda_n >= 1/Lambda
  Index n_lambda = 0;               // for n >= N_Lambda

  std::optional<GammaData> gamma;

  Psi0Policy psi0_policy = Psi0Policy::MinimalProduct;

  bool has_tn_data() const { return sigma.has_value() && lambda_cap.has_value(); }
};

/// lambda_n = lambda, beta_n = 1 - 1/(n+1), gamma_n = 1 + 1/(n+1) with
/// sigma_beta = chi_beta = sigma = chi_gamma = k, chi_lambda = 0,
/// Lambda = ceil(1/lambda), Gamma = 1, N_Lambda = N_Gamma = 0.
ParamSchedule builtin_example_schedule(double lambda_const);

/// lambda_n = lambda, beta_n = 1 - 2/(n+2), gamma_n = (n+3)/(n+2).
///
/// prod_{n=0}^{N} beta_{n+1} = 2/((N+2)(N+3)), so sigma_beta(k) is the
/// least N with (N+2)(N+3) >= 2(k+1).
/// sum_{i>n} (beta_{i+1} - beta_i) = 2/(n+3): chi_beta(k) = 2k.
/// 1 - beta_n = 2/(n+2): sigma(k) = 2k.
/// sum_{i>n} |gamma_{i+1} - gamma_i| = 1/(n+3): chi_gamma(k) = k.
ParamSchedule builtin_linear_schedule(double lambda_const);

/// ceil(1/lambda), snapping 1/lambda to an integer when it is within 1e-12
/// relative, so that lambda = 1/3 in floating point gives 3.
Index lambda_cap_for(double lambda_const);

/// Integer ceil(sqrt(v)).
Index ceil_sqrt(Index v);

/// Result of an oracle evaluation for a single k.
struct ModulusEntry {
  Index k = 0;
  std::optional<Index> minimal;  // nullopt => inconclusive
};

/// For each k <= k_max, the least n such that every partial-sum increment
/// sum_{i=n+1}^{m} b_i with m <= horizon is <= 1/(k+1). Terms must be
/// nonnegative. A k whose minimal index exceeds horizon/2 is reported as
/// inconclusive: the unobserved tail could still matter.
std::vector<ModulusEntry> oracle_cauchy_modulus(const RealSeq& terms,
                                                Index k_max, Index horizon);

/// For each k <= k_max, the least N with prod_{n=0}^{N} beta_{n+1} <= 1/(k+1),
/// searching N < horizon. Inconclusive when the product never gets there.
std::vector<ModulusEntry> oracle_product_rate(const RealSeq& beta, Index k_max,
                                              Index horizon);

/// Same for a rate of convergence of a nonnegative sequence to 0: least N
/// with a_n <= 1/(k+1) for all N <= n < horizon.
std::vector<ModulusEntry> oracle_convergence_rate(const RealSeq& a, Index k_max,
                                                  Index horizon);

/// Checks declared(k) >= oracle minimal(k) for every conclusive entry.
/// Inconclusive entries fail: a finite horizon cannot confirm them.
struct ModulusValidation {
  bool passed = true;
  std::vector<Index> failing_k;
  std::vector<Index> inconclusive_k;
};

ModulusValidation validate_modulus(const RateFn& declared,
                                   const std::vector<ModulusEntry>& oracle);

/// prod_{n=0}^{upto} beta_{n+1}, in log space once the range exceeds 1e4.
double beta_product(const RealSeq& beta, Index upto);

/// Least positive integer P with 1/P <= prod_{n=0}^{chi(3k+2)} beta_{n+1}.
/// Throws std::domain_error if a factor in that range is 0.
Index psi0(const ParamSchedule& schedule, const RateFn& chi, Index k);

}  // namespace tmiter
