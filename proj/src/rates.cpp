#include "tmiter/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmiter {

using checked::add;
using checked::mul;
using checked::pred;

std::string_view provenance_name(RateProvenance p) {
  switch (p) {
    case RateProvenance::GeneralTheorem: return "general_theorem";
    case RateProvenance::ExampleClosedForm: return "example_closed_form";
    case RateProvenance::LinearTheorem: return "linear_theorem";
    case RateProvenance::HalpernTranslated: return "halpern_translated";
  }
  return "?";
}

std::string_view cert_status_name(CertStatus s) {
  switch (s) {
    case CertStatus::Pass: return "pass";
    case CertStatus::Fail: return "fail";
    case CertStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

RateFn chi_combined(const RateFn& chi_T, const RateFn& chi_lambda,
                    const RateFn& chi_beta, Index M) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  return RateFn(
      [=](Index k) {
        const Index k1 = add(k, 1);
        const Index scaled = pred(mul(mul(8, M), k1));
        return std::max({chi_T(pred(mul(2, k1))), chi_lambda(scaled),
                         chi_beta(scaled)});
      },
      "chi");
}

RateFn sigma_ar(const RateFn& sigma_beta, const RateFn& chi, Psi0Fn psi0,
                Index M) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  return RateFn(
      [=](Index k) {
        const Index p = psi0(k);
        if (p < 1) throw std::domain_error("psi0 must be >= 1");
        const Index arg = pred(mul(mul(mul(6, M), add(k, 1)), p));
        const Index second = add(chi(add(mul(3, k), 2)), 1);
        return add(std::max(sigma_beta(arg), second), 1);
      },
      "Sigma");
}

RateFn translate_ar_to_tn_ar(const RateFn& phi, Index M, Index lambda_cap,
                             Index n_lambda, const RateFn& sigma) {
  if (M < 1 || lambda_cap < 1) {
    throw std::domain_error("M and Lambda must be >= 1");
  }
  return RateFn(
      [=](Index k) {
        const Index k1 = add(k, 1);
        const Index a = phi(pred(mul(mul(2, lambda_cap), k1)));
        const Index b = sigma(pred(mul(mul(mul(4, M), lambda_cap), k1)));
        return std::max({n_lambda, a, b});
      },
      "Sigma_T(" + phi.label() + ")");
}

Psi0Fn psi0_for(const ParamSchedule& schedule, const RateFn& chi) {
  switch (schedule.psi0_policy) {
    case Psi0Policy::ChiAt3kPlus2:
      return [chi](Index k) {
        return std::max<Index>(1, chi(add(mul(3, k), 2)));
      };
    case Psi0Policy::MinimalProduct:
      // Copy the schedule: the returned function outlives the argument.
      return [s = schedule, chi](Index k) { return psi0(s, chi, k); };
  }
  throw std::logic_error("unknown psi0 policy");
}

RateBundle general_rates(const ParamSchedule& schedule, const RateFn& chi_T,
                         Index M) {
  RateBundle b;
  b.chi_T = chi_T;
  b.chi = chi_combined(chi_T, schedule.chi_lambda, schedule.chi_beta, M);
  b.psi0 = psi0_for(schedule, b.chi);
  b.Sigma = sigma_ar(schedule.sigma_beta, b.chi, b.psi0, M);
  if (schedule.has_tn_data()) {
    b.Sigma_T = translate_ar_to_tn_ar(b.Sigma, M, *schedule.lambda_cap,
                                      schedule.n_lambda, *schedule.sigma);
  }
  b.provenance = RateProvenance::GeneralTheorem;
  return b;
}

RateFn example_sigma_closed_form(Index M) {
  return RateFn(
      [M](Index k) {
        const Index k1 = add(k, 1);
        return mul(mul(mul(144, mul(M, M)), k1), k1) - mul(mul(6, M), k1);
      },
      "144M^2(k+1)^2-6M(k+1)");
}

RateFn example_sigma_t_closed_form(Index M, Index lambda_cap) {
  return RateFn(
      [M, lambda_cap](Index k) {
        const Index k1 = add(k, 1);
        const Index ml = mul(M, lambda_cap);
        return mul(mul(mul(576, mul(ml, ml)), k1), k1) - mul(mul(12, ml), k1);
      },
      "576M^2L^2(k+1)^2-12ML(k+1)");
}

double LinearRates::step_bound(Index n) const {
  return 6.0 * static_cast<double>(M) / static_cast<double>(n + 2);
}

double LinearRates::tn_bound(Index n) const {
  return 10.0 * static_cast<double>(M) / (lambda * static_cast<double>(n + 2));
}

double LinearRates::cross_bound(Index n) const {
  return 20.0 * static_cast<double>(M) / (lambda * static_cast<double>(n + 2));
}

LinearRates linear_rates(Index M, double lambda_const) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  LinearRates r;
  r.M = M;
  r.lambda = lambda_const;
  r.lambda_cap = lambda_cap_for(lambda_const);
  const Index L = r.lambda_cap;
  auto linear = [](Index c, std::string label) {
    // c(k+1) - 2 with c >= 6, never negative.
    return RateFn([c](Index k) { return mul(c, add(k, 1)) - 2; },
                  std::move(label));
  };
  r.ar = linear(mul(6, M), "6M(k+1)-2");
  r.tn_ar = linear(mul(mul(10, M), L), "10M*Lambda(k+1)-2");
  r.tm_ar = linear(mul(mul(20, M), L), "20M*Lambda(k+1)-2");
  return r;
}

RateFn halpern_translate(const RateFn& Sigma, const RateFn& sigma, Index M) {
  if (M < 1) throw std::domain_error("M must be >= 1");
  return RateFn(
      [=](Index k) {
        const Index j = add(mul(3, k), 2);
        const Index alpha = sigma(pred(mul(mul(2, M), add(j, 1))));
        return std::max(alpha, Sigma(j));
      },
      "Sigma'(" + Sigma.label() + ")");
}

SabachShternReport sabach_shtern_check(std::span<const double> s, double L,
                                       Index horizon, double tol) {
  if (!(L > 0.0)) throw std::domain_error("L must be positive");
  if (s.empty()) throw std::invalid_argument("empty sequence");
  const Index last = std::min<Index>(horizon, s.size() - 1);
  auto a = [](Index n) { return 2.0 / static_cast<double>(n + 2); };

  SabachShternReport r;
  auto hyp = [&](Index idx, double excess, double lhs, double rhs) {
    r.max_hypothesis_excess = std::max(r.max_hypothesis_excess, excess);
    const double slack = tol + 1e-12 * std::max({1.0, lhs, rhs});
    if (excess > slack && r.hypothesis_holds) {
      r.hypothesis_holds = false;
      r.hypothesis_failure = idx;
    }
  };
  hyp(0, s[0] - L, s[0], L);
  for (Index n = 0; n < last; ++n) {
    const double rhs = (1.0 - a(n + 1)) * s[n] + (a(n) - a(n + 1)) * L;
    hyp(n + 1, s[n + 1] - rhs, s[n + 1], rhs);
  }
  for (Index n = 0; n <= last; ++n) {
    const double bound = 2.0 * L / static_cast<double>(n + 2);
    const double excess = s[n] - bound;
    r.max_conclusion_excess = std::max(r.max_conclusion_excess, excess);
    const double slack = tol + 1e-12 * std::max({1.0, s[n], bound});
    if (excess > slack && r.conclusion_holds) {
      r.conclusion_holds = false;
      r.conclusion_failure = n;
    }
  }
  return r;
}

bool CertificationReport::any_failure() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const CertEntry& e) { return e.status == CertStatus::Fail; });
}

bool CertificationReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const CertEntry& e) { return e.status == CertStatus::Pass; });
}

CertificationReport certify_rate(std::span<const double> residuals,
                                 const RateFn& rate, Index k_max, Index horizon,
                                 double tol, std::string rate_name) {
  if (horizon >= residuals.size()) {
    throw std::out_of_range("certification horizon " + std::to_string(horizon) +
                            " beyond recorded residuals (" +
                            std::to_string(residuals.size()) + ")");
  }
  // suffix_max[n] = max residual over [n, horizon]
  std::vector<double> suffix_max(horizon + 2, -1.0);
  for (Index n = horizon + 1; n-- > 0;) {
    suffix_max[n] = std::max(suffix_max[n + 1], residuals[n]);
  }

  CertificationReport rep;
  rep.rate_name = std::move(rate_name);
  rep.entries.reserve(k_max + 1);
  for (Index k = 0; k <= k_max; ++k) {
    const double bound = 1.0 / static_cast<double>(k + 1);
    CertEntry e;
    e.k = k;
    e.rate_k = rate(k);

    // Binary search on the nonincreasing suffix maximum.
    Index lo = 0;
    Index hi = horizon + 1;
    while (lo < hi) {
      const Index mid = lo + (hi - lo) / 2;
      if (suffix_max[mid] <= bound + tol) hi = mid;
      else lo = mid + 1;
    }
    e.minimal_empirical_index = lo;

    if (e.rate_k > horizon) {
      e.status = CertStatus::Inconclusive;
      e.worst_excess = 0.0;
    } else {
      e.worst_excess = suffix_max[e.rate_k] - bound;
      e.status = e.worst_excess <= tol ? CertStatus::Pass : CertStatus::Fail;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace tmiter
