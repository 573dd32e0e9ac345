#include "mpslearn/errors.hpp"
#include "mpslearn/plan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace mpslearn;

namespace {

std::vector<int> sites(int first, int last) {
  std::vector<int> out;
  for (int s = first; s <= last; ++s) out.push_back(s);
  return out;
}

// Brute-force scan of p d^(p-1) < B <= p d^p over p = 1..200.
int scan_interval(double B, int d) {
  for (int p = 1; p <= 200; ++p) {
    const double lo = p * std::pow(d, p - 1);
    const double hi = p * std::pow(d, p);
    if (lo < B && B <= hi) return p;
  }
  return 0;
}

double bisect_w(double z) {
  double lo = std::log(z) - std::log(std::log(z));
  double hi = std::log(z);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < z ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void check_invariants(const LayerPlan& plan) {
  const int n = plan.n;
  const int p = plan.p;
  ASSERT_GE((1LL << plan.M) * p, n);
  ASSERT_LT((1LL << (plan.M - 1)) * p, n);
  std::vector<int> seen;
  for (const auto& b : plan.layers[0]) seen.insert(seen.end(), b.support.begin(), b.support.end());
  ASSERT_EQ(seen, sites(0, n - 1));
  int projected = 0;
  for (std::size_t j = 0; j < plan.layers.size(); ++j) {
    ASSERT_EQ(plan.layers[j].size(), std::size_t{1} << (plan.M - 1 - j));
    for (std::size_t i = 0; i < plan.layers[j].size(); ++i) {
      const auto& b = plan.layers[j][i];
      projected += b.projected;
      ASSERT_EQ(static_cast<int>(b.carried.size()), p);
      ASSERT_TRUE(std::equal(b.carried.begin(), b.carried.end(), b.support.end() - p));
      ASSERT_EQ(static_cast<int>(b.support.size()) - b.projected, p);
      if (j > 0) {
        auto joined = plan.layers[j - 1][2 * i].carried;
        const auto& right = plan.layers[j - 1][2 * i + 1].carried;
        joined.insert(joined.end(), right.begin(), right.end());
        ASSERT_EQ(b.support, joined);
      }
    }
  }
  ASSERT_EQ(projected, n - p);
  ASSERT_EQ(static_cast<int>(plan.final_sites().size()), p);
}

}  // namespace

TEST(PlanLayers, TwentyNineSitesGolden) {
  auto plan = plan_layers(29, 2, 2);
  EXPECT_EQ(plan.M, 4);
  EXPECT_EQ(plan.ell1, 7);
  EXPECT_EQ(plan.s1, 1);
  EXPECT_EQ(plan.k1, 27);
  EXPECT_FALSE(plan.s1_amended);
  ASSERT_EQ(plan.layers[0].size(), 8u);
  // Labels below are the 1-based sites minus one.
  for (int i = 1; i <= 6; ++i) EXPECT_EQ(plan.layers[0][i - 1].support, sites(4 * (i - 1), 4 * i - 1));
  EXPECT_EQ(plan.layers[0][6].support, sites(24, 26));
  EXPECT_EQ(plan.layers[0][7].support, sites(27, 28));
  EXPECT_EQ(plan.layers[0][6].carried, sites(25, 26));
  EXPECT_EQ(plan.f(1, 6), 2);
  EXPECT_EQ(plan.f(1, 7), 1);
  EXPECT_EQ(plan.f(1, 8), 0);
  EXPECT_FALSE(plan.layers[0][7].acted);
  EXPECT_EQ(plan.layers[1][0].support, (std::vector<int>{2, 3, 6, 7}));
  EXPECT_EQ(plan.layers[1][3].support, (std::vector<int>{25, 26, 27, 28}));
  EXPECT_EQ(plan.layers[3][0].support, (std::vector<int>{14, 15, 27, 28}));
  EXPECT_EQ(plan.final_sites(), (std::vector<int>{27, 28}));
  check_invariants(plan);
}

TEST(PlanLayers, SmallestInstanceIsOneBlock) {
  auto plan = plan_layers(4, 2, 2);
  EXPECT_EQ(plan.M, 1);
  ASSERT_EQ(plan.layers.size(), 1u);
  ASSERT_EQ(plan.layers[0].size(), 1u);
  EXPECT_EQ(plan.layers[0][0].support, sites(0, 3));
  check_invariants(plan);
}

TEST(PlanLayers, DivisibleExcessIsAmended) {
  auto plan = plan_layers(8, 2, 2);
  EXPECT_EQ(plan.M, 2);
  EXPECT_EQ(plan.ell1, 2);
  EXPECT_EQ(plan.s1, 2);
  EXPECT_EQ(plan.k1, 8);
  EXPECT_TRUE(plan.s1_amended);
  EXPECT_EQ(plan.f(1, 1) + plan.f(1, 2), 4);
  check_invariants(plan);

  auto twelve = plan_layers(12, 2, 2);
  EXPECT_EQ(twelve.M, 3);
  EXPECT_EQ(twelve.ell1, 2);
  EXPECT_EQ(twelve.s1, 2);
  EXPECT_EQ(twelve.k1, 8);
  check_invariants(twelve);
}

TEST(PlanLayers, SweepInvariants) {
  for (int p = 1; p <= 4; ++p)
    for (int n = p + 1; n <= 64; ++n) {
      SCOPED_TRACE(testing::Message() << "n=" << n << " p=" << p);
      check_invariants(plan_layers(n, 2, p));
    }
}

TEST(PlanLayers, TooSmall) {
  try {
    plan_layers(2, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooSmall);
  }
}

TEST(PExact, Examples) {
  EXPECT_EQ(p_exact(2, 2), 2);
  EXPECT_EQ(p_exact(2, 3), 4);
  EXPECT_EQ(p_exact(4, 4), 2);
  EXPECT_EQ(p_exact(2, 1), 0);
  EXPECT_EQ(p_exact(3, 10), 6);
}

TEST(LambertW, Examples) {
  EXPECT_EQ(lambert_w(0.0), 0.0);
  EXPECT_NEAR(lambert_w(std::exp(1.0)), 1.0, 1e-15);
  const double w = lambert_w(10.0);
  EXPECT_NEAR(w * std::exp(w), 10.0, 1e-12 * 10.0);
  EXPECT_NEAR(w, bisect_w(10.0), 1e-12);
  EXPECT_THROW(lambert_w(-1.0), Error);
}

TEST(LambertW, ResidualAndSandwich) {
  for (double e = -6.0; e <= 12.0; e += 0.01) {
    const double z = std::pow(10.0, e);
    const double w = lambert_w(z);
    ASSERT_LE(std::abs(w * std::exp(w) - z), 1e-12 * z) << z;
    if (z > std::exp(1.0)) {
      ASSERT_LT(std::log(z) - std::log(std::log(z)), w);
      ASSERT_LT(w, std::log(z));
    }
  }
}

TEST(SolveP, RemarkConstructionGivesExactIntegers) {
  auto sol = solve_p_for_b(160.0, 2);
  EXPECT_NEAR(sol.a, 5.0, 1e-12);
  EXPECT_EQ(sol.p_candidate, 5);
  EXPECT_TRUE(sol.exists);
  for (int d : {2, 3, 4}) {
    for (int m = 1; m <= 12; ++m) {
      auto s = solve_p_for_b(m * std::pow(d, m), d);
      EXPECT_EQ(s.p_candidate, m);
      EXPECT_TRUE(s.exists);
    }
  }
}

TEST(SolveP, HundredMatchesScan) {
  auto sol = solve_p_for_b(100.0, 2);
  EXPECT_EQ(scan_interval(100.0, 2), 5);
  EXPECT_EQ(sol.p_candidate, 5);
  EXPECT_TRUE(sol.exists);
}

TEST(SolveP, GapValuesHaveNoSolution) {
  // For d = 3 the intervals (27, 81] and (108, 324] leave (81, 108] uncovered.
  auto sol = solve_p_for_b(3 * std::pow(3.0, 3) + 1, 3);
  EXPECT_EQ(scan_interval(sol.B, 3), 0);
  EXPECT_FALSE(sol.exists);
}

TEST(SolveP, AgreesWithBruteForceScan) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dist_d(2, 6);
  std::uniform_real_distribution<double> dist_e(0.0, 12.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = dist_d(rng);
    const double B = std::pow(10.0, dist_e(rng));
    auto sol = solve_p_for_b(B, d);
    const int scanned = scan_interval(B, d);
    ASSERT_EQ(sol.exists, scanned != 0) << "B=" << B << " d=" << d;
    if (scanned != 0) ASSERT_EQ(sol.p_candidate, scanned);
  }
}

TEST(SolveP, IntervalShorterThanOne) {
  for (int d = 2; d <= 11; ++d) {
    for (int k = 0; k < 100; ++k) {
      const double B = std::pow(10.0, 0.12 * k);
      auto sol = solve_p_for_b(B, d);
      ASSERT_LE(sol.a, sol.b);
      ASSERT_LT(sol.b - sol.a, 1.0);
    }
  }
  for (int d = 2; d <= 6; ++d)
    for (int p = 1; p <= 30; ++p) ASSERT_LT(p * std::pow(d, p), (p + 1) * std::pow(d, p));
}

TEST(SolveP, RejectsBadEpsilon) {
  try {
    solve_p_closest(8, 2, 2, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadEpsilon);
  }
  EXPECT_THROW(solve_p_closest(8, 2, 2, 1.5), Error);
}

TEST(SelectEpsilon, IntegerScanOracle) {
  const double target = 0.5;
  const double B = 64.0 * 8 * 4 / (std::pow(std::sqrt(2.0) - 1, 2) * target * target);
  int m = 1;
  while (m * std::pow(2.0, m) < B) ++m;
  auto choice = select_epsilon(8, 2, 2, target);
  EXPECT_EQ(choice.m, m);
  EXPECT_LE(choice.epsilon_prime, target);
  auto sol = solve_p_closest(8, 2, 2, choice.epsilon_prime);
  EXPECT_TRUE(sol.exists);
  EXPECT_EQ(sol.p_candidate, m);
}

TEST(SelectEpsilon, FixedPointAndMonotonicity) {
  auto first = select_epsilon(16, 2, 2, 0.3);
  auto again = select_epsilon(16, 2, 2, first.epsilon_prime);
  EXPECT_EQ(again.m, first.m);
  EXPECT_NEAR(again.epsilon_prime, first.epsilon_prime, 1e-15);
  int previous_m = 0;
  for (int n = 2; n <= 256; ++n) {
    auto c = select_epsilon(n, 2, 2, 0.4);
    ASSERT_GE(c.m, previous_m);
    ASSERT_LE(c.epsilon_prime, 0.4);
    previous_m = c.m;
    auto s = solve_p_closest(n, 2, 2, c.epsilon_prime);
    ASSERT_TRUE(s.exists);
    ASSERT_EQ(s.p_candidate, c.m);
  }
}

TEST(SelectEpsilon, AdjustedAccuracyRisesWithNWhileMHolds) {
  // eps' = sqrt(64 n D^2 / ((sqrt2-1)^2 m d^m)) grows with n until m steps up.
  auto a = select_epsilon(40, 2, 2, 0.4);
  auto b = select_epsilon(41, 2, 2, 0.4);
  ASSERT_EQ(a.m, b.m);
  EXPECT_GT(b.epsilon_prime, a.epsilon_prime);
}

TEST(Eta, Formulas) {
  const double c = std::pow(std::sqrt(2.0) - 1.0, 2);
  EXPECT_NEAR(eta_exact(1.0, 1), c / 64.0, 1e-18);
  EXPECT_NEAR(eta_exact(1.0, 1), 2.68e-3, 1e-5);
  EXPECT_NEAR(eta_exact(0.5, 3), eta_exact(1.0, 3) / 4, 1e-18);
  EXPECT_NEAR(eta_exact(0.5, 4), eta_exact(0.5, 3) / 2, 1e-18);
  EXPECT_NEAR(eta_closest(1.0, 1, 1, 1), c / 64.0, 1e-18);
  EXPECT_NEAR(eta_closest(0.3, 6, 2, 10), 3 * eta_closest(0.3, 2, 2, 10), 1e-18);
  EXPECT_NEAR(eta_closest(0.3, 2, 2, 30), eta_closest(0.3, 2, 2, 10) / 3, 1e-18);
}
