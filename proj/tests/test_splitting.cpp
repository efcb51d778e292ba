#include "oracles.hpp"

#include "tmiter/splitting.hpp"

#include <gtest/gtest.h>

using namespace tmiter;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST(ForwardBackward, ZeroPlusIdentityCollapsesToOrigin) {
  const auto B = quadratic_cocoercive(Vec::Ones(2), Vec::Zero(2));
  EXPECT_DOUBLE_EQ(B.beta_coco, 1.0);
  oracle::Gen g(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_LE(forward_backward_map(zero_monotone(), B, 1.0, g.vec(2, 10)).norm(), 1e-15);
  }
}

TEST(ForwardBackward, SoftThresholdStep) {
  EXPECT_DOUBLE_EQ(forward_backward_map(l1_monotone(1.0), zero_cocoercive(), 2.0, v1(3.0))[0], 1.0);
  oracle::Gen g(2);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.uniform(-8, 8), gam = g.uniform(0.1, 3.0), rho = g.uniform(0.0, 2.0);
    ASSERT_NEAR(forward_backward_map(l1_monotone(rho), zero_cocoercive(), gam, v1(x))[0],
                oracle::prox_abs(x, rho * gam), 1e-14);
  }
}

TEST(ForwardBackward, BoxWithQuadraticIsConstant) {
  const auto A = box_monotone(v1(0.0), v1(1.0));
  const auto B = quadratic_cocoercive(v1(1.0), v1(2.0));
  for (double x : {-5.0, 0.0, 0.3, 1.0, 7.0}) {
    EXPECT_DOUBLE_EQ(forward_backward_map(A, B, 1.0, v1(x))[0], 1.0);
  }
  EXPECT_DOUBLE_EQ(box_quadratic_solution(v1(0.0), v1(1.0), v1(1.0), v1(2.0))[0], 1.0);
}

TEST(ForwardBackward, StepSizeOutsideRangeIsRejected) {
  const auto B = quadratic_cocoercive(v1(1.0), v1(0.0));
  EXPECT_THROW(forward_backward_map(zero_monotone(), B, 2.0, v1(1.0)), std::domain_error);
  EXPECT_THROW(forward_backward_map(zero_monotone(), B, 0.0, v1(1.0)), std::domain_error);
  EXPECT_NO_THROW(forward_backward_map(zero_monotone(), B, 1.999, v1(1.0)));
}

TEST(Operators, FirmNonexpansivenessAndCocoercivity) {
  EXPECT_LE(firm_nonexpansiveness_excess(l1_monotone(0.7), 1.3, 4, 5000, 3), 1e-9);
  EXPECT_LE(firm_nonexpansiveness_excess(box_monotone(Vec::Constant(3, -1), Vec::Constant(3, 2)), 0.5, 3,
                                         5000, 4),
            1e-9);
  EXPECT_LE(firm_nonexpansiveness_excess(zero_monotone(), 1.0, 2, 1000, 5), 1e-9);
  EXPECT_LE(cocoercivity_excess(quadratic_cocoercive(Vec{{0.5, 0.25, 0.1}}, Vec{{1, 0, -1}}), 3, 5000, 6),
            1e-9);
  // Claiming a larger constant than the truth is caught.
  auto B = quadratic_cocoercive(Vec{{1.0, 2.0}}, Vec::Zero(2));
  B.beta_coco = 1.0;
  EXPECT_GT(cocoercivity_excess(B, 2, 2000, 7), 1e-3);
}

TEST(Lasso, DiagonalSolutionIsAZero) {
  const double rho = 0.1;
  const Vec diag{{0.5, 0.4, 0.25}}, b{{0.3, -0.2, 0.05}};
  const Vec z = lasso_diagonal_solution(rho, diag, b);
  // 0 in rho*sign(z) + diag.*z - b, componentwise.
  for (int i = 0; i < 3; ++i) {
    const double g = diag[i] * z[i] - b[i];
    if (z[i] != 0.0) EXPECT_NEAR(g + rho * (z[i] > 0 ? 1 : -1), 0.0, 1e-15);
    else EXPECT_LE(std::abs(g), rho);
  }
  const auto f = forward_backward_family(l1_monotone(rho), quadratic_cocoercive(diag, b),
                                         builtin_example_schedule(0.5).gamma->gamma, z);
  EXPECT_TRUE(check_fixed_point(f, EuclideanSpace(3), z, 1000, 1e-12).passed());
}

TEST(Tfb, FamiliesAreNonexpansiveAndJp2) {
  const auto ex = builtin_example_schedule(0.5);
  const auto B = quadratic_cocoercive(Vec{{0.5, 0.4}}, Vec{{0.3, -0.2}});
  for (const auto& A : {l1_monotone(0.1), box_monotone(Vec{{-1.0, -1.0}}, Vec{{1.0, 1.0}}), zero_monotone()}) {
    const auto f = forward_backward_family(A, B, ex.gamma->gamma, Vec::Zero(2));
    EXPECT_TRUE(check_nonexpansive(f, EuclideanSpace(2), 3000, 1000, 1e-12).passed()) << A.name;
    EXPECT_TRUE(check_jp2_consequence(f, ex.gamma->gamma, EuclideanSpace(2), 500, 20, 1e-12).passed())
        << A.name;
  }
}

TEST(Tfb, TrivialOperatorsGiveStationaryTrace) {
  TfbProblem P{zero_monotone(), zero_cocoercive(), builtin_example_schedule(0.5), Vec::Zero(2), Vec::Zero(2),
               Vec::Zero(2)};
  const auto tr = run_tfb(P, 500);
  for (double r : tr.residual_step) ASSERT_EQ(r, 0.0);
  for (double r : tr.residual_T) ASSERT_EQ(r, 0.0);
}

TEST(Tfb, StepSizesAreValidated) {
  // gamma_0 = 2 under the example schedule; beta = 1 forbids it.
  TfbProblem P{zero_monotone(), quadratic_cocoercive(v1(1.0), v1(0.0)), builtin_example_schedule(0.5), v1(0),
               v1(1), v1(0)};
  EXPECT_THROW(tfb_instance(P, 10), ConfigError);
  P.B = quadratic_cocoercive(v1(0.9), v1(0.0));
  EXPECT_NO_THROW(tfb_instance(P, 10));
}

TEST(Tfb, RatesMatchClosedForm) {
  const auto ex = builtin_example_schedule(0.5);
  EXPECT_EQ(tfb_rates(ex, 1).Sigma(0), 138u);
  EXPECT_EQ(tfb_rates(ex, 2).Sigma(0), 564u);
  for (Index M = 1; M <= 3; ++M) {
    const auto r = tfb_rates(ex, M);
    for (Index k = 0; k <= 20; ++k) {
      EXPECT_EQ(r.Sigma(k), 144 * M * M * (k + 1) * (k + 1) - 6 * M * (k + 1));
      EXPECT_EQ(r.chi_T(k), 2 * M * (k + 1) - 1);
    }
  }
}

TEST(Tfb, ConstantStepSizesGiveConstantChiT) {
  auto s = builtin_example_schedule(0.5);
  s.gamma = GammaData{[](Index) { return 0.5; }, RateFn::constant(0), 2, 4};
  const auto r = tfb_rates(s, 3);
  for (Index k = 0; k < 10; ++k) EXPECT_EQ(r.chi_T(k), 4u);
}

TEST(Tfb, MissingGammaIsAConfigError) {
  auto s = builtin_example_schedule(0.5);
  s.gamma.reset();
  EXPECT_THROW(tfb_rates(s, 1), ConfigError);
}

TEST(Tfb, LassoRunCertifies) {
  const double rho = 0.1;
  const Vec diag{{0.5, 0.4, 0.25}}, b{{0.3, -0.2, 0.05}};
  const Vec z = lasso_diagonal_solution(rho, diag, b);
  TfbProblem P{l1_monotone(rho), quadratic_cocoercive(diag, b), builtin_example_schedule(0.5),
               Vec{{1.0, 0.0, 0.0}}, Vec{{0.0, 0.5, 0.0}}, z};
  const Index k_max = 5;
  const auto inst = tfb_instance(P, 10);
  const auto rates = tfb_rates(P.schedule, inst.M);
  const Index H = (*rates.Sigma_T)(k_max) + 1000;
  const auto tr = run_tfb(P, H);
  const auto cert = certify_rate(tr.residual_step, rates.Sigma, k_max, H - 1, 1e-9, "Sigma");
  EXPECT_TRUE(cert.all_pass());
  const auto cert_t = certify_rate(tr.residual_T, *rates.Sigma_T, k_max, H - 1, 1e-9, "Sigma_T");
  EXPECT_TRUE(cert_t.all_pass());
  EXPECT_LT(tr.residual_step.back(), 1e-3);
}

TEST(Tfb, BoxQuadraticConvergesToBoundary) {
  TfbProblem P{box_monotone(v1(0.0), v1(1.0)), quadratic_cocoercive(v1(0.6), v1(2.0)), builtin_linear_schedule(0.5),
               v1(0.0), v1(0.0), box_quadratic_solution(v1(0.0), v1(1.0), v1(0.6), v1(2.0))};
  EXPECT_DOUBLE_EQ(P.z[0], 1.0);
  RunOptions opts;
  opts.store_points = true;
  const auto tr = run_tfb(P, 20'000, opts);
  EXPECT_NEAR(std::get<Vec>(tr.x.back())[0], 1.0, 1e-3);
  const auto inst = tfb_instance(P, 10);
  const auto lr = linear_rates(inst.M, 0.5);
  for (Index n = 0; n < 20'000; ++n) ASSERT_LE(tr.residual_step[n], lr.step_bound(n) + 1e-9);
}
