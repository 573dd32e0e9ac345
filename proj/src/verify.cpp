#include "mpslearn/verify.hpp"

#include "mpslearn/complexity.hpp"
#include "mpslearn/disentangler.hpp"
#include "mpslearn/errors.hpp"
#include "mpslearn/learner.hpp"
#include "mpslearn/mps.hpp"
#include "mpslearn/plan.hpp"
#include "mpslearn/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace mpslearn {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

// Tracks the worst value of a check and the number of violations.
struct Tally {
  int checks = 0;
  int violations = 0;
  double worst = 0.0;

  void add(bool ok, double value) {
    ++checks;
    if (!ok) ++violations;
    worst = checks == 1 ? value : std::max(worst, value);
  }
  PropertyResult result(std::string name, const char* what) const {
    return {std::move(name), violations == 0,
            std::to_string(violations) + "/" + std::to_string(checks) + " violations, " + format(what, worst)};
  }
};

ComplexVector random_state(int n, int D, Boundary boundary, std::uint64_t seed) {
  StateSpec spec;
  spec.n = n;
  spec.d = 2;
  spec.D = D;
  spec.boundary = boundary;
  spec.seed = seed;
  return expand(random_mps(spec));
}

struct AuditedRun {
  ComplexVector input;
  LearnResult result;
};

std::vector<AuditedRun> audited_runs(std::uint64_t seed, bool noisy, int count) {
  std::vector<AuditedRun> runs;
  for (int k = 0; k < count; ++k) {
    AuditedRun run;
    run.input = random_state(10, 2, Boundary::Open, seed * 1000 + static_cast<std::uint64_t>(k));
    LearnParams params;
    params.D = 2;
    params.epsilon = 0.2;
    params.audit = true;
    params.seed = seed + static_cast<std::uint64_t>(k);
    OracleMode mode;
    if (noisy) {
      mode.kind = OracleKind::BoundedNoise;
      mode.seed = seed * 7 + static_cast<std::uint64_t>(k);
    }
    run.result = learn(QuantumStateBackend::pure(run.input, 2, 10), params, mode);
    runs.push_back(std::move(run));
  }
  return runs;
}

// Brute-force scan of p d^(p-1) < B <= p d^p.
int scan_interval(double B, int d) {
  for (int p = 1; p <= 400; ++p) {
    const double lo = p * std::pow(d, p - 1);
    const double hi = p * std::pow(d, p);
    if (lo < B && B <= hi * (1.0 + 1e-12)) return p;
    if (B <= hi) return 0;
  }
  return 0;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"rank", "eckart-young", "monotonicity", "layer-bounds",
                                              "lambert", "plan", "dominance"};
  return names;
}

std::vector<SuiteResult> run_suite(std::string_view name, std::uint64_t seed) {
  if (name == "all") {
    std::vector<SuiteResult> out;
    for (const auto& n : suite_names()) out.push_back(run_suite(n, seed).front());
    return out;
  }
  if (name == "rank") return {rank_suite(seed)};
  if (name == "eckart-young") return {eckart_young_suite(seed)};
  if (name == "monotonicity") return {monotonicity_suite(seed)};
  if (name == "layer-bounds") return {layer_bounds_suite(seed)};
  if (name == "lambert") return {lambert_suite(seed)};
  if (name == "plan") return {plan_suite(seed)};
  if (name == "dominance") return {dominance_suite(seed)};
  throw Error(ErrorCode::BadParameter, "unknown suite '" + std::string(name) + "'");
}

SuiteResult rank_suite(std::uint64_t seed) {
  SuiteResult out{"rank", {}};
  Tally rank;
  Tally invariance;
  Rng rng = make_rng(seed, {1});
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + trial % 7;
    const int D = 2 + (trial / 7) % 2;
    const Boundary boundary = trial % 2 == 0 ? Boundary::Open : Boundary::Periodic;
    const ComplexVector psi = random_state(n, D, boundary, seed * 100000 + static_cast<std::uint64_t>(trial));
    ComplexVector rotated = psi;
    for (int s = 0; s < n; ++s) {
      const std::vector<int> axis{s};
      apply_local(rotated, 2, n, axis, random_unitary(2, rng));
    }
    for (int first = 0; first < n; ++first) {
      for (int last = first; last < n; ++last) {
        std::vector<int> block;
        for (int s = first; s <= last; ++s) block.push_back(s);
        if (block.size() > 6) continue;
        const int r = numerical_rank(block_rdm(psi, 2, n, block), 1e-10);
        rank.add(r <= D * D, r - D * D);
        const int r2 = numerical_rank(block_rdm(rotated, 2, n, block), 1e-10);
        invariance.add(r2 == r, std::abs(r2 - r));
      }
    }
  }
  out.properties.push_back(rank.result("block rank <= D^2", "max rank - D^2 = %.0f"));
  out.properties.push_back(invariance.result("rank invariant under local unitaries", "max rank change %.0f"));
  return out;
}

SuiteResult eckart_young_suite(std::uint64_t seed) {
  SuiteResult out{"eckart-young", {}};
  Tally capped;
  Tally threshold;
  Rng rng = make_rng(seed, {2});
  const double etas[] = {1e-1, 1e-2, 1e-3};
  for (std::uint64_t k = 0; k < 3; ++k) {
    const double eta = etas[k];
    for (int trial = 0; trial < 200; ++trial) {
      const int D = 1 + trial % 2;
      const Index dim = 16;
      const ComplexMatrix sigma = random_density_matrix(dim, D * D, rng);
      OracleMode mode;
      mode.kind = OracleKind::BoundedNoise;
      mode.eta = eta;
      mode.seed = seed;
      const auto est = estimate_reduced(sigma, 2, mode, k * 1000 + static_cast<std::uint64_t>(trial));
      const auto u = build_rank_capped(est.estimate, 2, D * D, 2, seed);
      const ComplexMatrix lost = ComplexMatrix::Identity(dim, dim) - selected_projector(u);
      const double leak = (lost * sigma).trace().real();
      capped.add(leak <= 2 * eta + 1e-12, leak / eta);
      const auto v = build_threshold(est.estimate, 2, eta, seed);
      const ComplexMatrix rest = ComplexMatrix::Identity(dim, dim) - selected_projector(v);
      const double op = operator_norm(rest * sigma * rest);
      threshold.add(op <= 2 * eta + 1e-12, op / eta);
    }
  }
  out.properties.push_back(capped.result("Tr[(I - Pi_W) sigma] <= 2 eta", "worst leak/eta %.3e"));
  out.properties.push_back(threshold.result("||(I - Pi) sigma (I - Pi)|| <= 2 eta", "worst norm/eta %.4f"));
  return out;
}

SuiteResult monotonicity_suite(std::uint64_t seed) {
  SuiteResult out{"monotonicity", {}};
  for (bool noisy : {false, true}) {
    Tally tally;
    for (const auto& run : audited_runs(seed, noisy, 3)) {
      const auto& c = run.result.circuit;
      for (int j = 1; j <= c.depth(); ++j) {
        const auto prev = stepwise_state(c, run.result.audit, j - 1);
        const auto cur = stepwise_state(c, run.result.audit, j);
        const double m = min_eigenvalue_difference(prev.factor, cur.factor);
        tally.add(m >= -1e-10, -m);
      }
    }
    out.properties.push_back(tally.result(noisy ? "rho^j <= rho^(j-1), bounded-noise oracle"
                                                : "rho^j <= rho^(j-1), exact oracle",
                                          "worst negative part %.3e"));
  }
  return out;
}

SuiteResult layer_bounds_suite(std::uint64_t seed) {
  SuiteResult out{"layer-bounds", {}};
  Tally loss;
  Tally leak;
  for (const auto& run : audited_runs(seed, true, 4)) {
    const auto& c = run.result.circuit;
    const auto& report = run.result.report;
    for (int j = 1; j <= c.depth(); ++j) {
      const double before = stepwise_state(c, run.result.audit, j - 1).expectation(run.input);
      const double after = stepwise_state(c, run.result.audit, j).expectation(run.input);
      const double bound = report.per_layer[static_cast<std::size_t>(j - 1)].fidelity_drop_bound;
      loss.add(std::abs(before - after) <= bound, std::abs(before - after) / bound);
      for (const auto& block : report.per_layer[static_cast<std::size_t>(j - 1)].blocks) {
        leak.add(block.leakage <= 2 * c.meta.eta, block.leakage / c.meta.eta);
      }
    }
  }
  out.properties.push_back(leak.result("block leakage <= 2 eta", "worst leak/eta %.3e"));
  out.properties.push_back(loss.result("per-layer fidelity loss within bound", "worst loss/bound %.3e"));
  return out;
}

SuiteResult lambert_suite(std::uint64_t seed) {
  SuiteResult out{"lambert", {}};
  Tally identity;
  Tally sandwich;
  for (int k = 0; k <= 180; ++k) {
    const double z = std::pow(10.0, -6.0 + k * 0.1);
    const double w = lambert_w(z);
    identity.add(std::abs(w * std::exp(w) - z) <= 1e-12 * z, std::abs(w * std::exp(w) - z) / z);
    if (z > std::exp(1.0)) {
      const bool ok = std::log(z) - std::log(std::log(z)) < w && w < std::log(z);
      sandwich.add(ok, ok ? 0.0 : 1.0);
    }
  }
  out.properties.push_back(identity.result("w e^w = z", "worst relative residual %.3e"));
  out.properties.push_back(sandwich.result("ln z - ln ln z < W(z) < ln z", "violation flag %.0f"));

  Tally width;
  Tally agree;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(0.0, 12.0);
  std::uniform_int_distribution<int> dist_d(2, 6);
  for (int k = 0; k < 1000; ++k) {
    const int d = dist_d(rng);
    const double B = std::pow(10.0, expo(rng));
    const auto sol = solve_p_for_b(B, d);
    width.add(sol.a <= sol.b && sol.b - sol.a < 1.0, sol.b - sol.a);
    const int scanned = scan_interval(B, d);
    const bool ok = (scanned != 0) == sol.exists && (!sol.exists || scanned == sol.p_candidate);
    agree.add(ok, ok ? 0.0 : 1.0);
  }
  out.properties.push_back(width.result("a <= b and b - a < 1", "max width %.6f"));
  out.properties.push_back(agree.result("solver matches interval scan", "mismatch flag %.0f"));

  Tally remark;
  for (int d : {2, 3, 4}) {
    for (int m = 1; m <= 12; ++m) {
      const auto sol = solve_p_for_b(m * std::pow(d, m), d);
      remark.add(sol.exists && sol.p_candidate == m, std::abs(sol.p_candidate - m));
    }
  }
  out.properties.push_back(remark.result("B = m d^m gives p = m", "max |p - m| %.0f"));
  return out;
}

SuiteResult plan_suite(std::uint64_t) {
  SuiteResult out{"plan", {}};
  const auto plan = plan_layers(29, 2, 2);
  auto range = [](int a, int b) {
    std::vector<int> v;
    for (int s = a; s <= b; ++s) v.push_back(s - 1);
    return v;
  };
  const auto& first = plan.layers.front();
  const bool golden = plan.M == 4 && plan.ell1 == 7 && plan.s1 == 1 && plan.k1 == 27 && first.size() == 8 &&
                      first[0].support == range(1, 4) && first[6].support == range(25, 27) &&
                      first[7].support == range(28, 29);
  out.properties.push_back({"golden plan n=29 p=2", golden, golden ? "M=4 l1=7 s1=1 k1=27" : "layout differs"});

  Tally tally;
  for (int p = 1; p <= 4; ++p) {
    for (int n = p + 1; n <= 64; ++n) {
      const auto pl = plan_layers(n, 2, p);
      std::vector<int> seen;
      for (const auto& block : pl.layers.front()) seen.insert(seen.end(), block.support.begin(), block.support.end());
      std::vector<int> all(static_cast<std::size_t>(n));
      for (int s = 0; s < n; ++s) all[static_cast<std::size_t>(s)] = s;
      int projected = 0;
      for (const auto& layer : pl.layers)
        for (const auto& block : layer) projected += block.projected;
      const bool ok = seen == all && projected == n - p && pl.final_sites().size() == static_cast<std::size_t>(p) &&
                      (1LL << pl.M) * p >= n && (1LL << (pl.M - 1)) * p < n;
      tally.add(ok, ok ? 0.0 : 1.0);
    }
  }
  out.properties.push_back(tally.result("partition and projection counts, n <= 64, p <= 4", "violation flag %.0f"));
  return out;
}

SuiteResult dominance_suite(std::uint64_t) {
  SuiteResult out{"dominance", {}};
  const std::vector<int> ns{8, 16, 32, 64};
  const std::vector<double> eps{0.05, 0.1, 0.2, 0.3, 0.5};
  const std::vector<int> ds{2, 3, 4};
  const std::vector<int> Ds{1, 2, 3};
  const auto dom = dominance_grid(ns, eps, ds, Ds, 0.1);
  out.properties.push_back({"N/K > 1 on the regime grid", dom.min > 1.0, format("min ratio %.3e", dom.min)});
  const std::vector<int> ns2{8, 64, 512, 4096};
  const std::vector<double> eps2{0.01, 0.05, 0.1, 0.5};
  const std::vector<int> Ds2{2, 3};
  const auto ratio = closest_form_ratio_grid(ns2, eps2, ds, Ds2, 0.1);
  out.properties.push_back({"raw and closed-form budgets within [1/8, 8]", ratio.min >= 0.125 && ratio.max <= 8.0,
                            format("range [%.4f, %.4f]", ratio.min, ratio.max)});
  return out;
}

}  // namespace mpslearn
