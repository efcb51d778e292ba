#include "oracles.hpp"

#include "tmiter/mappings.hpp"
#include "tmiter/rates.hpp"

#include <gtest/gtest.h>

using namespace tmiter;

namespace {

Index example_sigma(Index M, Index k) { return 144 * M * M * (k + 1) * (k + 1) - 6 * M * (k + 1); }

Index example_sigma_t(Index M, Index L, Index k) {
  return 576 * M * M * L * L * (k + 1) * (k + 1) - 12 * M * L * (k + 1);
}

RateBundle example_bundle(Index M, double lambda) {
  const auto s = builtin_example_schedule(lambda);
  return general_rates(s, chi_T_from_gamma(M, 1, 0, s.gamma->chi_gamma), M);
}

}  // namespace

TEST(ChiCombined, ExampleSchedule) {
  EXPECT_EQ(example_bundle(1, 0.5).chi(0), 7u);
  EXPECT_EQ(example_bundle(2, 0.5).chi(1), 31u);
  for (Index M = 1; M <= 4; ++M) {
    const auto b = example_bundle(M, 0.5);
    for (Index k = 0; k <= 30; ++k) EXPECT_EQ(b.chi(k), 8 * M * (k + 1) - 1);
  }
}

TEST(ChiCombined, ConstantFamily) {
  const RateFn chi = chi_combined(constant_family_chi_T(), RateFn::constant(0), RateFn::identity(), 1);
  for (Index k = 0; k <= 30; ++k) EXPECT_EQ(chi(k), 8 * (k + 1) - 1);
}

TEST(SigmaAr, ExampleClosedForm) {
  const auto b = example_bundle(1, 0.5);
  EXPECT_EQ(b.Sigma(0), 138u);
  EXPECT_EQ(b.Sigma(1), 564u);
  EXPECT_EQ(b.provenance, RateProvenance::GeneralTheorem);
}

TEST(SigmaAr, DegenerateInputs) {
  const RateFn s = sigma_ar(RateFn::constant(0), RateFn::constant(0), [](Index) { return Index{1}; }, 1);
  for (Index k = 0; k < 10; ++k) EXPECT_EQ(s(k), 2u);
}

TEST(SigmaAr, ClosedFormsForManyParameters) {
  for (Index M = 1; M <= 5; ++M) {
    for (double lambda : {0.5, 1.0 / 3.0}) {
      const Index L = lambda_cap_for(lambda);
      const auto b = example_bundle(M, lambda);
      const RateFn cs = example_sigma_closed_form(M);
      const RateFn ct = example_sigma_t_closed_form(M, L);
      for (Index k = 0; k <= 50; ++k) {
        ASSERT_EQ(b.Sigma(k), example_sigma(M, k)) << "M=" << M << " k=" << k;
        ASSERT_EQ((*b.Sigma_T)(k), example_sigma_t(M, L, k)) << "M=" << M << " k=" << k;
        ASSERT_EQ(cs(k), example_sigma(M, k));
        ASSERT_EQ(ct(k), example_sigma_t(M, L, k));
      }
    }
  }
}

TEST(SigmaAr, MinimalPsi0Policy) {
  auto s = builtin_example_schedule(0.5);
  s.psi0_policy = Psi0Policy::MinimalProduct;
  const auto b = general_rates(s, chi_T_from_gamma(2, 1, 0, s.gamma->chi_gamma), 2);
  for (Index k = 0; k <= 10; ++k) {
    EXPECT_EQ(b.psi0(k), 48 * (k + 1) + 1);
    EXPECT_EQ(b.Sigma(k), 12 * (k + 1) * (48 * (k + 1) + 1));
  }
}

TEST(TnTranslation, ExampleAndMaxSemantics) {
  EXPECT_EQ((*example_bundle(1, 0.5).Sigma_T)(0), 2280u);
  const RateFn big = translate_ar_to_tn_ar(RateFn::constant(3), 1, 2, 1'000'000, RateFn::constant(5));
  EXPECT_EQ(big(0), 1'000'000u);
  const RateFn zero = translate_ar_to_tn_ar(RateFn::constant(0), 1, 2, 0, RateFn::constant(0));
  for (Index k = 0; k < 10; ++k) EXPECT_EQ(zero(k), 0u);
}

TEST(GeneralRates, SigmaTRequiresSigmaAndLambdaCap) {
  auto s = builtin_example_schedule(0.5);
  s.sigma.reset();
  EXPECT_FALSE(general_rates(s, RateFn::constant(0), 1).Sigma_T.has_value());
}

TEST(LinearRates, ValuesAndBounds) {
  const auto lr = linear_rates(1, 0.5);
  EXPECT_EQ(lr.ar(0), 4u);
  EXPECT_EQ(lr.tn_ar(0), 18u);
  EXPECT_EQ(lr.tm_ar(0), 38u);
  EXPECT_DOUBLE_EQ(lr.step_bound(0), 3.0);
  EXPECT_DOUBLE_EQ(lr.tn_bound(0), 10.0);
  EXPECT_DOUBLE_EQ(lr.cross_bound(0), 20.0);
  const auto l3 = linear_rates(3, 1.0 / 3.0);
  for (Index k = 0; k < 20; ++k) {
    EXPECT_EQ(l3.ar(k), 18 * (k + 1) - 2);
    EXPECT_EQ(l3.tn_ar(k), 90 * (k + 1) - 2);
    EXPECT_EQ(l3.tm_ar(k), 180 * (k + 1) - 2);
  }
  // Each rate lands where its pointwise bound drops below 1/(k+1).
  for (Index k = 0; k < 50; ++k) {
    EXPECT_LE(lr.step_bound(lr.ar(k)), 1.0 / static_cast<double>(k + 1) + 1e-15);
    EXPECT_LE(lr.tn_bound(lr.tn_ar(k)), 1.0 / static_cast<double>(k + 1) + 1e-15);
  }
}

TEST(SabachShtern, ExactBoundSequence) {
  const double L = 3.0;
  std::vector<double> s(1001);
  for (Index n = 0; n <= 1000; ++n) s[n] = 2 * L / static_cast<double>(n + 2);
  const auto r = sabach_shtern_check(s, L, 1000, 1e-12);
  EXPECT_TRUE(r.hypothesis_holds);
  EXPECT_TRUE(r.conclusion_holds);
  // Substituting s_n = 2L/(n+2) makes the hypothesis an identity.
  EXPECT_NEAR(r.max_hypothesis_excess, 0.0, 1e-14);
}

TEST(SabachShtern, ZeroSequence) {
  const std::vector<double> s(100, 0.0);
  const auto r = sabach_shtern_check(s, 1.0, 99, 1e-12);
  EXPECT_TRUE(r.hypothesis_holds && r.conclusion_holds);
}

TEST(SabachShtern, ConstantSequenceRejectedAtOne) {
  const std::vector<double> s(100, 2.0);
  const auto r = sabach_shtern_check(s, 2.0, 99, 1e-9);
  EXPECT_FALSE(r.conclusion_holds);
  EXPECT_EQ(r.conclusion_failure, Index{1});
  EXPECT_FALSE(r.hypothesis_holds);
  EXPECT_EQ(r.hypothesis_failure, Index{1});
}

TEST(SabachShtern, HypothesisImpliesConclusionOnRandomSequences) {
  oracle::Gen g(31);
  for (int trial = 0; trial < 200; ++trial) {
    const double L = g.uniform(0.1, 5.0);
    std::vector<double> s{g.uniform(0.0, L)};
    for (Index n = 0; n < 300; ++n) {
      const double a = 2.0 / static_cast<double>(n + 2), a1 = 2.0 / static_cast<double>(n + 3);
      s.push_back(g.uniform(0.0, 1.0) * ((1 - a1) * s.back() + (a - a1) * L));
    }
    const auto r = sabach_shtern_check(s, L, 300, 1e-12);
    ASSERT_TRUE(r.hypothesis_holds);
    ASSERT_TRUE(r.conclusion_holds);
  }
}

TEST(HalpernTranslate, Compositions) {
  const RateFn t = halpern_translate(RateFn::identity(), RateFn::identity(), 1);
  for (Index k = 0; k < 20; ++k) EXPECT_EQ(t(k), 6 * k + 5);
  const RateFn big = halpern_translate(RateFn::constant(1'000'000), RateFn::identity(), 1);
  for (Index k = 0; k < 5; ++k) EXPECT_EQ(big(k), 1'000'000u);
  EXPECT_EQ(halpern_translate(RateFn::constant(0), RateFn::identity(), 2)(0), 11u);
}

TEST(Certify, ZeroResidualsAlwaysPass) {
  const std::vector<double> r(1000, 0.0);
  const auto rep = certify_rate(r, RateFn::constant(0), 20, 999);
  EXPECT_TRUE(rep.all_pass());
  for (const auto& e : rep.entries) EXPECT_EQ(e.minimal_empirical_index, 0u);
}

TEST(Certify, BoundaryEqualityPasses) {
  std::vector<double> r(1000);
  for (Index n = 0; n < 1000; ++n) r[n] = 1.0 / static_cast<double>(n + 1);
  const auto rep = certify_rate(r, RateFn::identity(), 50, 999);
  EXPECT_TRUE(rep.all_pass());
  for (const auto& e : rep.entries) {
    EXPECT_EQ(e.minimal_empirical_index, e.k);
    EXPECT_EQ(e.status, CertStatus::Pass);
  }
}

TEST(Certify, TooSmallRateFailsAndLargeRateIsInconclusive) {
  std::vector<double> r(1000);
  for (Index n = 0; n < 1000; ++n) r[n] = 1.0 / static_cast<double>(n + 1);
  const auto fail = certify_rate(r, RateFn::constant(0), 3, 999);
  EXPECT_TRUE(fail.any_failure());
  EXPECT_EQ(fail.entries[0].status, CertStatus::Pass);
  EXPECT_EQ(fail.entries[3].status, CertStatus::Fail);
  EXPECT_NEAR(fail.entries[3].worst_excess, 1.0 - 0.25, 1e-15);
  const auto inc = certify_rate(r, RateFn::constant(5000), 3, 999);
  for (const auto& e : inc.entries) EXPECT_EQ(e.status, CertStatus::Inconclusive);
  EXPECT_FALSE(inc.any_failure());
  EXPECT_FALSE(inc.all_pass());
  EXPECT_THROW(certify_rate(r, RateFn::identity(), 3, 1000), std::out_of_range);
}

TEST(Certify, AgreesWithBruteForceAndMonotoneDominance) {
  oracle::Gen g(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(800);
    for (Index n = 0; n < 800; ++n) r[n] = g.uniform(0.0, 3.0) / static_cast<double>(n + 1);
    const Index last = 799;
    const auto min_rep = certify_rate(r, RateFn::constant(0), 12, last);
    std::vector<Index> minimal;
    for (const auto& e : min_rep.entries) {
      const Index want = oracle::brute_tail_index(r, last, 1.0 / static_cast<double>(e.k + 1) + 1e-12);
      ASSERT_EQ(e.minimal_empirical_index, want);
      minimal.push_back(want);
    }
    const RateFn exact([minimal](Index k) { return minimal[k]; });
    ASSERT_TRUE(certify_rate(r, exact, 12, last).all_pass());
    const RateFn bigger([minimal](Index k) { return minimal[k] + 7; });
    const auto rep = certify_rate(r, bigger, 12, last);
    ASSERT_FALSE(rep.any_failure());
    for (Index k = 0; k <= 12; ++k) {
      if (minimal[k] > 0) {
        const RateFn smaller([minimal](Index j) { return minimal[j] - 1; });
        ASSERT_EQ(certify_rate(r, smaller, 12, last).entries[k].status, CertStatus::Fail);
      }
    }
  }
}

TEST(Overflow, HugeArgumentsThrowInsteadOfWrapping) {
  const auto b = example_bundle(1'000'000, 0.5);
  EXPECT_THROW(b.Sigma(1'000'000'000), std::overflow_error);
}
