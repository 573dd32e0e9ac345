#include "mpslearn/plan.hpp"

#include "mpslearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mpslearn {

namespace {

const double kSqrt2Minus1Sq = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);
constexpr double kBoundaryTol = 1e-12;

std::vector<int> site_range(int first, int last) {
  std::vector<int> out;
  for (int s = first; s <= last; ++s) out.push_back(s);
  return out;
}

std::vector<int> tail(const std::vector<int>& v, int count) {
  return {v.end() - count, v.end()};
}

// p * d^p in floating point; the values stay far from overflow for p < 1000.
double p_times_power(int p, int d, int exponent) {
  return static_cast<double>(p) * std::pow(static_cast<double>(d), exponent);
}

}  // namespace

LayerPlan plan_layers(int n, int d, int p) {
  if (p < 1 || n <= p) {
    throw Error(ErrorCode::TooSmall, "plan needs n > p >= 1 (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
  }
  if (d < 2) throw Error(ErrorCode::BadParameter, "local dimension must be at least 2");
  LayerPlan plan;
  plan.n = n;
  plan.d = d;
  plan.p = p;
  plan.M = 1;
  while ((1LL << plan.M) * p < n) ++plan.M;
  const int half = static_cast<int>((1LL << (plan.M - 1)) * p);
  const int excess = n - half;
  plan.ell1 = (excess + p - 1) / p;
  plan.s1 = excess % p;
  if (plan.s1 == 0) {
    plan.s1 = p;
    plan.s1_amended = true;
  }
  plan.k1 = 2 * plan.ell1 * p - p + plan.s1;

  // Sites in the formulas are 1-based; the stored plan is 0-based.
  const int slots = 1 << (plan.M - 1);
  std::vector<PlanBlock> first;
  for (int i = 1; i <= slots; ++i) {
    PlanBlock block;
    if (i < plan.ell1) {
      block.support = site_range(2 * (i - 1) * p, 2 * i * p - 1);
      block.projected = p;
    } else if (i == plan.ell1) {
      block.support = site_range(2 * (plan.ell1 - 1) * p, plan.k1 - 1);
      block.projected = plan.s1;
    } else {
      block.support = site_range(plan.k1 + (i - plan.ell1 - 1) * p, plan.k1 + (i - plan.ell1) * p - 1);
      block.projected = 0;
      block.acted = false;
    }
    block.carried = tail(block.support, p);
    first.push_back(std::move(block));
  }
  plan.layers.push_back(std::move(first));

  for (int j = 2; j <= plan.M; ++j) {
    const auto& prev = plan.layers.back();
    std::vector<PlanBlock> layer;
    for (std::size_t i = 0; i + 1 < prev.size(); i += 2) {
      PlanBlock block;
      block.support = prev[i].carried;
      block.support.insert(block.support.end(), prev[i + 1].carried.begin(), prev[i + 1].carried.end());
      block.projected = p;
      block.carried = tail(block.support, p);
      layer.push_back(std::move(block));
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

int p_exact(int d, int D) {
  if (d < 2 || D < 1) throw Error(ErrorCode::BadParameter, "need d >= 2 and D >= 1");
  int c = 0;
  long long power = 1;
  while (power < D) {
    power *= d;
    ++c;
  }
  return 2 * c;
}

double lambert_w(double z) {
  if (std::isnan(z) || z < 0.0) throw Error(ErrorCode::NegativeArgument, "lambert_w needs z >= 0");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;
  double w = z < std::exp(1.0) ? std::log1p(z) : std::log(z) - std::log(std::log(z));
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) return w;
  }
  throw Error(ErrorCode::NoConvergence, "lambert_w did not converge");
}

double lambert_b(int n, int D, double epsilon) {
  return 64.0 * n * static_cast<double>(D) * D / (kSqrt2Minus1Sq * epsilon * epsilon);
}

LambertSolution solve_p_for_b(double B, int d) {
  if (d < 2) throw Error(ErrorCode::BadParameter, "local dimension must be at least 2");
  if (!(B > 0.0) || !std::isfinite(B)) throw Error(ErrorCode::BadParameter, "B must be positive and finite");
  LambertSolution sol;
  const double ln_d = std::log(static_cast<double>(d));
  sol.B = B;
  sol.z = B * ln_d;
  sol.a = lambert_w(sol.z) / ln_d;
  sol.b = lambert_w(B * d * ln_d) / ln_d;
  // The analytic ceil(a) can miss by one when B sits on an interval edge, so
  // settle the integer by direct comparison.
  auto covers = [&](int p) { return B <= p_times_power(p, d, p) * (1.0 + kBoundaryTol); };
  int p = std::max(1, static_cast<int>(std::ceil(sol.a)));
  while (p > 1 && covers(p - 1)) --p;
  while (!covers(p)) ++p;
  sol.p_candidate = p;
  sol.exists = p_times_power(p, d, p - 1) < B;
  return sol;
}

LambertSolution solve_p_closest(int n, int d, int D, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1]");
  if (n < 1 || D < 1) throw Error(ErrorCode::BadParameter, "need n >= 1 and D >= 1");
  return solve_p_for_b(lambert_b(n, D, epsilon), d);
}

EpsilonChoice select_epsilon(int n, int d, int D, double epsilon_target) {
  if (!(epsilon_target > 0.0 && epsilon_target <= 1.0)) {
    throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1]");
  }
  if (d < 2 || n < 1 || D < 1) throw Error(ErrorCode::BadParameter, "need d >= 2, n >= 1, D >= 1");
  const double target_b = lambert_b(n, D, epsilon_target);
  EpsilonChoice out;
  out.m = 1;
  while (p_times_power(out.m, d, out.m) < target_b * (1.0 - kBoundaryTol)) ++out.m;
  const double md = p_times_power(out.m, d, out.m);
  out.epsilon_prime = std::min(epsilon_target, std::sqrt(64.0 * n * static_cast<double>(D) * D / (kSqrt2Minus1Sq * md)));
  return out;
}

double eta_exact(double epsilon, int M) {
  return kSqrt2Minus1Sq * epsilon * epsilon / std::ldexp(1.0, M + 5);
}

double eta_closest(double epsilon, int p, int D, int n) {
  return kSqrt2Minus1Sq * epsilon * epsilon * p / (64.0 * static_cast<double>(D) * D * n);
}

}  // namespace mpslearn
