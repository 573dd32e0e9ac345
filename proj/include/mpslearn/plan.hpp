#pragma once

#include <vector>

namespace mpslearn {

/// One unitary slot of the tree. Sites are 0-based original labels.
struct PlanBlock {
  std::vector<int> support;
  /// Last p sites of the support, handed to the next layer.
  std::vector<int> carried;
  /// Leading sites of the support projected onto |0> after the unitary.
  int projected = 0;
  /// False for first-layer slots past ell1, which pass through untouched.
  bool acted = true;

  std::vector<int> projected_sites() const {
    return {support.begin(), support.begin() + projected};
  }
};

struct LayerPlan {
  int n = 0;
  int d = 2;
  int p = 1;
  int M = 1;
  int ell1 = 1;
  int s1 = 0;
  int k1 = 0;
  /// s1 was raised from 0 to p so layer one removes n - 2^(M-1) p qudits.
  bool s1_amended = false;
  /// layers[j - 1][i - 1] is block i of layer j.
  std::vector<std::vector<PlanBlock>> layers;

  /// Projected-qudit count of block i in layer j (both 1-based).
  int f(int j, int i) const { return layers.at(j - 1).at(i - 1).projected; }
  const std::vector<int>& final_sites() const { return layers.back().front().carried; }
};

/// Tree schedule for n sites with half-block size p. Requires n > p >= 1.
LayerPlan plan_layers(int n, int d, int p);

/// 2 * ceil(log_d D) in integer arithmetic.
int p_exact(int d, int D);

/// Principal branch of the Lambert W function, z >= 0.
double lambert_w(double z);

struct LambertSolution {
  double B = 0.0;
  double z = 0.0;
  double a = 0.0;
  double b = 0.0;
  int p_candidate = 0;
  bool exists = false;
};

/// 64 n D^2 / ((sqrt2 - 1)^2 eps^2).
double lambert_b(int n, int D, double epsilon);

/// Solves p d^(p-1) < B <= p d^p for the block size p of the closest-state
/// learner. p_candidate is the smallest p with B <= p d^p.
LambertSolution solve_p_closest(int n, int d, int D, double epsilon);

/// Same, starting from B directly.
LambertSolution solve_p_for_b(double B, int d);

struct EpsilonChoice {
  int m = 0;
  double epsilon_prime = 0.0;
};

/// Smallest m with m d^m >= B(target) and the accuracy eps' <= target for
/// which B(eps') = m d^m exactly.
EpsilonChoice select_epsilon(int n, int d, int D, double epsilon_target);

double eta_exact(double epsilon, int M);
double eta_closest(double epsilon, int p, int D, int n);

}  // namespace mpslearn
