#include "tmiter/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmiter {

namespace {

// Relative slack on oracle comparisons against 1/(k+1). Several builtin
// sequences hit the threshold exactly in real arithmetic.
constexpr double kOracleSlack = 1e-12;

bool at_most(double value, Index k) {
  const double bound = 1.0 / static_cast<double>(k + 1);
  return value <= bound * (1.0 + kOracleSlack);
}

void check_lambda_const(double lambda_const) {
  if (!(lambda_const > 0.0 && lambda_const < 1.0)) {
    throw std::domain_error("constant lambda must lie in (0, 1)");
  }
}

}  // namespace

Index ceil_sqrt(Index v) {
  auto r = static_cast<Index>(std::sqrt(static_cast<long double>(v)));
  while (r * r < v) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= v) --r;
  return r;
}

Index lambda_cap_for(double lambda_const) {
  check_lambda_const(lambda_const);
  const double inv = 1.0 / lambda_const;
  const double nearest = std::round(inv);
  if (std::abs(inv - nearest) <= 1e-12 * inv) return static_cast<Index>(nearest);
  return static_cast<Index>(std::ceil(inv));
}

ParamSchedule builtin_example_schedule(double lambda_const) {
  check_lambda_const(lambda_const);
  ParamSchedule s;
  s.name = "example";
  s.beta = [](Index n) { return 1.0 - 1.0 / static_cast<double>(n + 1); };
  s.lambda = [lambda_const](Index) { return lambda_const; };
  s.sigma_beta = RateFn::identity();
  s.chi_beta = RateFn::identity();
  s.chi_lambda = RateFn::constant(0);
  s.sigma = RateFn::identity();
  s.lambda_cap = lambda_cap_for(lambda_const);
  s.n_lambda = 0;
  s.gamma = GammaData{
      [](Index n) { return 1.0 + 1.0 / static_cast<double>(n + 1); },
      RateFn::identity(), 1, 0};
  s.psi0_policy = Psi0Policy::ChiAt3kPlus2;
  return s;
}

ParamSchedule builtin_linear_schedule(double lambda_const) {
  check_lambda_const(lambda_const);
  ParamSchedule s;
  s.name = "linear";
  s.beta = [](Index n) { return 1.0 - 2.0 / static_cast<double>(n + 2); };
  s.lambda = [lambda_const](Index) { return lambda_const; };
  s.sigma_beta = RateFn(
      [](Index k) {
        const Index target = checked::mul(2, checked::add(k, 1));
        const Index r = ceil_sqrt(target);
        Index N = r >= 3 ? r - 3 : 0;
        while ((N + 2) * (N + 3) < target) ++N;
        return N;
      },
      "min{N : (N+2)(N+3) >= 2(k+1)}");
  s.chi_beta = RateFn::affine(2, 0);
  s.chi_lambda = RateFn::constant(0);
  s.sigma = RateFn::affine(2, 0);
  s.lambda_cap = lambda_cap_for(lambda_const);
  s.n_lambda = 0;
  s.gamma = GammaData{
      [](Index n) {
        return static_cast<double>(n + 3) / static_cast<double>(n + 2);
      },
      RateFn::identity(), 1, 0};
  s.psi0_policy = Psi0Policy::MinimalProduct;
  return s;
}

std::vector<ModulusEntry> oracle_cauchy_modulus(const RealSeq& terms,
                                                Index k_max, Index horizon) {
  // tail[n] = sum_{i=n+1}^{horizon} b_i, the largest increment starting at n
  // when all terms are nonnegative.
  std::vector<long double> tail(horizon + 1, 0.0L);
  for (Index n = horizon; n-- > 0;) {
    const double b = terms(n + 1);
    if (!(b >= 0.0)) {
      throw std::domain_error("Cauchy-modulus oracle needs nonnegative terms");
    }
    tail[n] = tail[n + 1] + static_cast<long double>(b);
  }
  std::vector<ModulusEntry> out;
  out.reserve(k_max + 1);
  for (Index k = 0; k <= k_max; ++k) {
    // tail is nonincreasing, so the first hit is the minimal modulus.
    Index n = 0;
    while (n <= horizon && !at_most(static_cast<double>(tail[n]), k)) ++n;
    ModulusEntry e{k, std::nullopt};
    if (2 * n <= horizon) e.minimal = n;
    out.push_back(e);
  }
  return out;
}

std::vector<ModulusEntry> oracle_product_rate(const RealSeq& beta, Index k_max,
                                              Index horizon) {
  std::vector<ModulusEntry> out;
  out.reserve(k_max + 1);
  long double log_prod = 0.0L;
  bool zero = false;
  Index N = 0;
  Index k = 0;
  // The product is nonincreasing in N, so a single sweep serves every k.
  for (; N < horizon && k <= k_max; ++N) {
    const double b = beta(N + 1);
    if (b < 0.0 || b > 1.0) throw std::domain_error("beta outside [0, 1]");
    if (b == 0.0) zero = true;
    else log_prod += std::log(static_cast<long double>(b));
    const double prod = zero ? 0.0 : static_cast<double>(std::exp(log_prod));
    while (k <= k_max && at_most(prod, k)) {
      out.push_back({k, N});
      ++k;
    }
  }
  for (; k <= k_max; ++k) out.push_back({k, std::nullopt});
  return out;
}

std::vector<ModulusEntry> oracle_convergence_rate(const RealSeq& a, Index k_max,
                                                  Index horizon) {
  // suffix_max[n] = max_{n <= m < horizon} a_m
  std::vector<double> suffix_max(horizon + 1, 0.0);
  for (Index n = horizon; n-- > 0;) {
    suffix_max[n] = std::max(suffix_max[n + 1], a(n));
  }
  std::vector<ModulusEntry> out;
  for (Index k = 0; k <= k_max; ++k) {
    Index n = 0;
    while (n < horizon && !at_most(suffix_max[n], k)) ++n;
    ModulusEntry e{k, std::nullopt};
    if (2 * n <= horizon) e.minimal = n;
    out.push_back(e);
  }
  return out;
}

ModulusValidation validate_modulus(const RateFn& declared,
                                   const std::vector<ModulusEntry>& oracle) {
  ModulusValidation v;
  for (const auto& e : oracle) {
    if (!e.minimal) {
      v.inconclusive_k.push_back(e.k);
      v.passed = false;
    } else if (declared(e.k) < *e.minimal) {
      v.failing_k.push_back(e.k);
      v.passed = false;
    }
  }
  return v;
}

double beta_product(const RealSeq& beta, Index upto) {
  if (upto + 1 > 10'000) {
    long double log_prod = 0.0L;
    for (Index n = 0; n <= upto; ++n) {
      const double b = beta(n + 1);
      if (b == 0.0) return 0.0;
      log_prod += std::log(static_cast<long double>(b));
    }
    return static_cast<double>(std::exp(log_prod));
  }
  double prod = 1.0;
  for (Index n = 0; n <= upto; ++n) prod *= beta(n + 1);
  return prod;
}

Index psi0(const ParamSchedule& schedule, const RateFn& chi, Index k) {
  const Index upto = chi(checked::add(checked::mul(3, k), 2));
  const double prod = beta_product(schedule.beta, upto);
  if (!(prod > 0.0)) {
    throw std::domain_error(
        "psi0 undefined: some beta_{n+1} = 0 below chi(3k+2) = " +
        std::to_string(upto));
  }
  const double inv = 1.0 / prod;
  if (!(inv < 1.8e19)) throw std::overflow_error("psi0 exceeds 64-bit range");
  // Products of exact rationals land a few ulps off an integer reciprocal;
  // snap those instead of rounding up past the true minimum.
  const double nearest = std::round(inv);
  Index p = std::abs(inv - nearest) <= 1e-9 * inv
                ? static_cast<Index>(nearest)
                : static_cast<Index>(std::ceil(inv));
  return std::max<Index>(p, 1);
}

}  // namespace tmiter
