#include "mpslearn/complexity.hpp"
#include "mpslearn/errors.hpp"
#include "mpslearn/plan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mpslearn;

namespace {

const std::vector<int> kNs{64, 128, 256, 512, 1024, 2048, 4096};

BudgetInputs base() {
  return BudgetInputs{64, 2, 2, 0.1, 0.1, 1.0};
}

}  // namespace

TEST(Formula, ExactOursDirectEvaluation) {
  // D=2, d=2: log_d D = 1, so the value is 64 * 4 * 64^3 * ln(640) / 1e-4.
  const double expected = 64.0 * 4.0 * 262144.0 * std::log(640.0) / 1e-4;
  EXPECT_NEAR(budget_exact_ours(base()) / expected, 1.0, 1e-12);
}

TEST(Formula, PreviousResultsDirectEvaluation) {
  const double ln = std::log(640.0);
  EXPECT_NEAR(budget_exact_previous(base()) / (std::pow(64.0, 5) * 4.0 * ln / 1e-4), 1.0, 1e-12);
  EXPECT_NEAR(budget_closest_previous(base()) / (std::pow(64.0, 9) * 256.0 * ln / 1e-8), 1.0, 1e-12);
  EXPECT_NEAR(budget_closest_footnote(base()) / (8.0 * std::pow(64.0, 10) * 1024.0 * ln / 1e-10), 1.0, 1e-12);
}

TEST(Formula, ClosestOursDirectEvaluation) {
  const double c = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);
  const double L = std::log(std::log(2.0) * 64.0 * 64.0 * 4.0 / (c * 0.01));
  const double expected = 4096.0 * std::pow(64.0, 7) * 16.0 * std::pow(std::log(2.0), 7) * std::log(640.0) /
                          (1e-12 * std::pow(L, 7));
  EXPECT_NEAR(budget_closest_ours(base()) / expected, 1.0, 1e-10);
}

TEST(Formula, EpsilonLaws) {
  auto in = base();
  const double a = budget_exact_ours(in);
  const double b = budget_exact_previous(in);
  const double c = budget_closest_previous(in);
  in.epsilon /= 2;
  EXPECT_NEAR(budget_exact_ours(in) / a, 16.0, 1e-9);
  EXPECT_NEAR(budget_exact_previous(in) / b, 16.0, 1e-9);
  EXPECT_NEAR(budget_closest_previous(in) / c, 256.0, 1e-9);
}

TEST(Formula, DegenerateBondDimension) {
  auto in = base();
  in.D = 1;
  try {
    (void)budget_exact_ours(in);
    FAIL() << "expected DegenerateD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateD);
  }
  in.D = 2;
  in.epsilon = 1.5;
  EXPECT_THROW((void)budget_exact_previous(in), Error);
}

TEST(Formula, OursBeatsPreviousAsNGrows) {
  auto in = base();
  double last = 1e300;
  for (int n : kNs) {
    in.n = n;
    const double ratio = budget_exact_ours(in) / budget_exact_previous(in);
    EXPECT_LT(ratio, last);
    last = ratio;
  }
  EXPECT_LT(last, 1e-3);
}

TEST(Formula, ClosestOursIncreasesWithD) {
  auto in = base();
  double last = 0.0;
  for (int D = 1; D <= 6; ++D) {
    in.D = D;
    const double v = budget_closest_ours(in);
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(Slopes, NExponents) {
  EXPECT_NEAR(n_slope(Formula::ExactOurs, base(), kNs), 3.0, 0.05);
  EXPECT_NEAR(n_slope(Formula::ExactPrevious, base(), kNs), 5.0, 0.05);
  EXPECT_NEAR(n_slope(Formula::ClosestPrevious, base(), kNs), 9.0, 0.05);
  EXPECT_NEAR(n_slope(Formula::ClosestFootnote, base(), kNs), 10.0, 0.05);
  EXPECT_NEAR(n_slope(Formula::ClosestOurs, base(), kNs), 7.0, 0.5);
  // The log factor alone adds about 1/ln(n/delta) to the raw fit.
  EXPECT_GT(n_slope(Formula::ExactOurs, base(), kNs, false), 3.05);
}

TEST(Slopes, EpsilonExponents) {
  const std::vector<double> eps{0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  EXPECT_NEAR(epsilon_slope(Formula::ExactOurs, base(), eps), 4.0, 1e-9);
  EXPECT_NEAR(epsilon_slope(Formula::ExactPrevious, base(), eps), 4.0, 1e-9);
  EXPECT_NEAR(epsilon_slope(Formula::ClosestPrevious, base(), eps), 8.0, 1e-9);
  auto in = base();
  in.n = 4096;
  const std::vector<double> small{1e-4, 2e-4, 5e-4, 1e-3};
  const double s = epsilon_slope(Formula::ClosestOurs, in, small);
  EXPECT_GE(s, 11.5);
  EXPECT_LE(s, 12.0);
}

TEST(Slopes, FitRecoversExactPowerLaw) {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{3, 3 * 8.0, 3 * 64.0, 3 * 512.0};
  EXPECT_NEAR(log_log_slope(x, y), 3.0, 1e-12);
  const std::vector<double> one{1};
  EXPECT_THROW((void)log_log_slope(one, one), Error);
}

TEST(Dominance, DirectEvaluationAndGrowth) {
  auto in = base();
  EXPECT_NEAR(dominance_ratio(in, 3, 1e-3) / (64.0 * 0.01 * 64.0 / (3.0 * 1e-6)), 1.0, 1e-12);
  const double a = dominance_ratio(in, 3, 1e-3);
  in.n = 128;
  EXPECT_GT(dominance_ratio(in, 3, 1e-3), a);
  EXPECT_NEAR(final_tomo_budget(base(), 3) / (64.0 * std::log(640.0) / 0.01), 1.0, 1e-12);
}

TEST(Dominance, RegimeGrid) {
  const std::vector<int> ns{8, 16, 32, 64};
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.3, 0.5};
  const std::vector<int> ds{2, 3, 4};
  const std::vector<int> Ds{1, 2, 3};
  const auto stats = dominance_grid(ns, eps, ds, Ds, 0.1);
  EXPECT_EQ(stats.points, 4 * 5 * 3 * 3);
  EXPECT_GT(stats.min, 1.0);
}

TEST(ClosedForm, RawAndClosedFormTrackEachOther) {
  const std::vector<int> ns{8, 64, 512, 4096};
  const std::vector<double> eps{0.01, 0.05, 0.1, 0.5};
  const std::vector<int> ds{2, 3, 4};
  const std::vector<int> Ds{2, 3};
  const auto stats = closest_form_ratio_grid(ns, eps, ds, Ds, 0.1);
  std::printf("closed-form ratio range [%.4f, %.4f]\n", stats.min, stats.max);
  EXPECT_GE(stats.min, 1.0 / 8.0);
  EXPECT_LE(stats.max, 8.0);
}
