#include "mpslearn/complexity.hpp"

#include "mpslearn/errors.hpp"
#include "mpslearn/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpslearn {

namespace {

const double kSqrt2Minus1Sq = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);

double log_factor(const BudgetInputs& in) {
  return std::log(in.n / in.delta);
}

int closest_p(const BudgetInputs& in) {
  return solve_p_closest(in.n, in.d, in.D, in.epsilon).p_candidate;
}

template <typename F>
GridStats sweep(std::span<const int> ns, std::span<const double> epsilons, std::span<const int> ds,
                std::span<const int> Ds, double delta, F&& value) {
  GridStats stats;
  stats.min = std::numeric_limits<double>::infinity();
  stats.max = -std::numeric_limits<double>::infinity();
  for (int n : ns)
    for (double eps : epsilons)
      for (int d : ds)
        for (int D : Ds) {
          const BudgetInputs in{n, d, D, eps, delta, 1.0};
          const double v = value(in);
          stats.min = std::min(stats.min, v);
          stats.max = std::max(stats.max, v);
          ++stats.points;
        }
  return stats;
}

}  // namespace

void validate(const BudgetInputs& in) {
  if (in.n < 1 || in.d < 2 || in.D < 1) throw Error(ErrorCode::BadParameter, "need n >= 1, d >= 2, D >= 1");
  if (!(in.epsilon > 0.0 && in.epsilon < 1.0)) throw Error(ErrorCode::BadParameter, "epsilon must lie in (0, 1)");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 1)");
  if (!(in.constant > 0.0)) throw Error(ErrorCode::BadParameter, "constant must be positive");
}

double budget_exact_ours(const BudgetInputs& in) {
  validate(in);
  if (in.D < 2) throw Error(ErrorCode::DegenerateD, "log_d D vanishes for D < 2");
  const double log_d_D = std::log(static_cast<double>(in.D)) / std::log(static_cast<double>(in.d));
  return in.constant * std::pow(in.D, 6) * std::pow(in.d, 2) * std::pow(in.n, 3) * log_factor(in) /
         (std::pow(log_d_D, 3) * std::pow(in.epsilon, 4));
}

double budget_exact_previous(const BudgetInputs& in) {
  validate(in);
  return in.constant * std::pow(in.n, 5) * std::pow(in.D, 2) * log_factor(in) / std::pow(in.epsilon, 4);
}

double closest_log_term(const BudgetInputs& in) {
  validate(in);
  return std::log(std::log(static_cast<double>(in.d)) * lambert_b(in.n, in.D, in.epsilon));
}

double budget_closest_ours(const BudgetInputs& in) {
  validate(in);
  const double L = closest_log_term(in);
  if (!(L > 0.0)) throw Error(ErrorCode::BadParameter, "log term must be positive");
  return in.constant * std::pow(in.D, 12) * std::pow(in.n, 7) * std::pow(in.d, 4) *
         std::pow(std::log(static_cast<double>(in.d)), 7) * log_factor(in) / (std::pow(in.epsilon, 12) * std::pow(L, 7));
}

double budget_closest_previous(const BudgetInputs& in) {
  validate(in);
  return in.constant * std::pow(in.n, 9) * std::pow(in.D, 8) * log_factor(in) / std::pow(in.epsilon, 8);
}

double budget_closest_footnote(const BudgetInputs& in) {
  validate(in);
  return in.constant * std::pow(in.d, 3) * std::pow(in.n, 10) * std::pow(in.D, 10) * log_factor(in) /
         std::pow(in.epsilon, 10);
}

double final_tomo_budget(const BudgetInputs& in, int p) {
  validate(in);
  if (p < 1) throw Error(ErrorCode::BadParameter, "p must be at least 1");
  return in.constant * std::pow(in.d, 2.0 * p) * log_factor(in) / (in.epsilon * in.epsilon);
}

double dominance_ratio(const BudgetInputs& in, int p, double eta) {
  validate(in);
  if (p < 1 || !(eta > 0.0)) throw Error(ErrorCode::BadParameter, "need p >= 1 and eta > 0");
  return in.n * in.epsilon * in.epsilon * std::pow(in.d, 2.0 * p) / (p * eta * eta);
}

double closest_raw_budget(const BudgetInputs& in) {
  validate(in);
  const int p = closest_p(in);
  const double eta = eta_closest(in.epsilon, p, in.D, in.n);
  return in.constant * in.n * std::pow(in.d, 4) * log_factor(in) / (p * std::pow(eta, 6));
}

double closest_form_ratio(const BudgetInputs& in) {
  const double absorbed = std::pow(64.0 / kSqrt2Minus1Sq, 6);
  return closest_raw_budget(in) / (budget_closest_ours(in) * absorbed);
}

std::string_view to_string(Formula f) {
  switch (f) {
    case Formula::ExactOurs: return "exact_ours";
    case Formula::ExactPrevious: return "exact_previous";
    case Formula::ClosestOurs: return "closest_ours";
    case Formula::ClosestPrevious: return "closest_previous";
    case Formula::ClosestFootnote: return "closest_footnote";
  }
  return "exact_ours";
}

double evaluate(Formula f, const BudgetInputs& in) {
  switch (f) {
    case Formula::ExactOurs: return budget_exact_ours(in);
    case Formula::ExactPrevious: return budget_exact_previous(in);
    case Formula::ClosestOurs: return budget_closest_ours(in);
    case Formula::ClosestPrevious: return budget_closest_previous(in);
    case Formula::ClosestFootnote: return budget_closest_footnote(in);
  }
  return 0.0;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::BadParameter, "slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw Error(ErrorCode::BadParameter, "slope fit needs positive values");
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::BadParameter, "slope fit needs distinct x values");
  return (m * sxy - sx * sy) / denom;
}

double n_slope(Formula f, BudgetInputs base, std::span<const int> ns, bool strip_log) {
  std::vector<double> x, y;
  for (int n : ns) {
    base.n = n;
    const double v = evaluate(f, base);
    x.push_back(n);
    y.push_back(strip_log ? v / log_factor(base) : v);
  }
  return log_log_slope(x, y);
}

double epsilon_slope(Formula f, BudgetInputs base, std::span<const double> epsilons) {
  std::vector<double> x, y;
  for (double eps : epsilons) {
    base.epsilon = eps;
    x.push_back(1.0 / eps);
    y.push_back(evaluate(f, base));
  }
  return log_log_slope(x, y);
}

GridStats closest_form_ratio_grid(std::span<const int> ns, std::span<const double> epsilons,
                                  std::span<const int> ds, std::span<const int> Ds, double delta) {
  return sweep(ns, epsilons, ds, Ds, delta, [](const BudgetInputs& in) { return closest_form_ratio(in); });
}

GridStats dominance_grid(std::span<const int> ns, std::span<const double> epsilons, std::span<const int> ds,
                         std::span<const int> Ds, double delta) {
  return sweep(ns, epsilons, ds, Ds, delta, [](const BudgetInputs& in) {
    const int p = closest_p(in);
    return dominance_ratio(in, p, eta_closest(in.epsilon, p, in.D, in.n));
  });
}

}  // namespace mpslearn
