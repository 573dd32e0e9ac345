#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace mpslearn {

struct BudgetInputs {
  int n = 64;
  int d = 2;
  int D = 2;
  double epsilon = 0.1;
  double delta = 0.1;
  double constant = 1.0;
};

/// Throws BadParameter unless n, d, D are positive (d >= 2) and
/// epsilon, delta lie in (0, 1).
void validate(const BudgetInputs& in);

/// D^6 d^2 n^3 ln(n/delta) / ((log_d D)^3 eps^4). Throws DegenerateD for D < 2.
double budget_exact_ours(const BudgetInputs& in);
/// n^5 D^2 ln(n/delta) / eps^4.
double budget_exact_previous(const BudgetInputs& in);
/// D^12 n^7 d^4 (ln d)^7 ln(n/delta) / (eps^12 L^7).
double budget_closest_ours(const BudgetInputs& in);
/// n^9 D^8 ln(n/delta) / eps^8.
double budget_closest_previous(const BudgetInputs& in);
/// Alternative accounting d^3 n^10 D^10 ln(n/delta) / eps^10.
double budget_closest_footnote(const BudgetInputs& in);

/// L = ln(ln d * 64 n D^2 / ((sqrt2 - 1)^2 eps^2)).
double closest_log_term(const BudgetInputs& in);

/// d^(2p) ln(n/delta) / eps^2.
double final_tomo_budget(const BudgetInputs& in, int p);
/// n eps^2 d^(2p) / (p eta^2).
double dominance_ratio(const BudgetInputs& in, int p, double eta);

/// n d^4 ln(n/delta) / (p eta^6) with p and eta chosen as the closest-state
/// learner would choose them.
double closest_raw_budget(const BudgetInputs& in);
/// closest_raw_budget over budget_closest_ours with the (64/(sqrt2-1)^2)^6
/// factor that the closed form absorbs into its constant divided out.
double closest_form_ratio(const BudgetInputs& in);

enum class Formula { ExactOurs, ExactPrevious, ClosestOurs, ClosestPrevious, ClosestFootnote };

inline constexpr Formula kAllFormulas[] = {Formula::ExactOurs, Formula::ExactPrevious, Formula::ClosestOurs,
                                          Formula::ClosestPrevious, Formula::ClosestFootnote};

std::string_view to_string(Formula f);
double evaluate(Formula f, const BudgetInputs& in);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Growth exponent in n. With `strip_log` the ln(n/delta) factor is divided
/// out before fitting.
double n_slope(Formula f, BudgetInputs base, std::span<const int> ns, bool strip_log = true);
/// Growth exponent in 1/eps.
double epsilon_slope(Formula f, BudgetInputs base, std::span<const double> epsilons);

struct GridStats {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

/// closest_form_ratio over n x eps x d x D.
GridStats closest_form_ratio_grid(std::span<const int> ns, std::span<const double> epsilons,
                                  std::span<const int> ds, std::span<const int> Ds, double delta);
/// dominance_ratio over the same kind of grid, with p and eta from the
/// closest-state learner.
GridStats dominance_grid(std::span<const int> ns, std::span<const double> epsilons, std::span<const int> ds,
                         std::span<const int> Ds, double delta);

}  // namespace mpslearn
