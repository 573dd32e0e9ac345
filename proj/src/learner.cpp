#include "mpslearn/learner.hpp"

#include "mpslearn/disentangler.hpp"
#include "mpslearn/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpslearn {

namespace {

constexpr std::uint64_t kLayerStream = 65536;
constexpr double kSvdDrop = 1e-14;
constexpr Index kMaxContraction = Index{1} << 22;

Index power(int d, std::size_t k) {
  return static_cast<Index>(ipow(static_cast<std::uint64_t>(d), static_cast<unsigned>(k)));
}

std::vector<int> positions_in(const std::vector<int>& sites, const std::vector<int>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto it = std::lower_bound(sites.begin(), sites.end(), label);
    if (it == sites.end() || *it != label) {
      throw Error(ErrorCode::MalformedCircuit, "site " + std::to_string(label) + " is not in the register");
    }
    out.push_back(static_cast<int>(it - sites.begin()));
  }
  return out;
}

std::vector<int> layer_projected(const LayerPlan& plan, int j) {
  std::vector<int> out;
  for (const auto& block : plan.layers[static_cast<std::size_t>(j - 1)]) {
    auto sites = block.projected_sites();
    out.insert(out.end(), sites.begin(), sites.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> merge_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Undo layers from..1: insert the projected zeros, then apply each U^dag.
ComplexVector lift(ComplexVector v, const CircuitDescription& circuit, int from) {
  std::vector<int> sites = remaining_sites(circuit, from);
  for (int a = from; a >= 1; --a) {
    const auto projected = layer_projected(circuit.plan, a);
    std::vector<int> before = merge_sorted(sites, projected);
    v = insert_zero_axes(v, circuit.d, static_cast<int>(before.size()), positions_in(before, projected));
    const auto& layer = circuit.plan.layers[static_cast<std::size_t>(a - 1)];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!layer[i].acted) continue;
      const auto& u = circuit.unitaries[static_cast<std::size_t>(a - 1)][i];
      apply_local(v, circuit.d, static_cast<int>(before.size()), positions_in(before, layer[i].support), u.adjoint());
    }
    sites = std::move(before);
  }
  return v;
}

std::uint64_t block_seed(std::uint64_t seed, int j, int i) {
  Rng rng = make_rng(seed, {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i)});
  return rng();
}

ComplexVector top_eigenvector(const ComplexMatrix& estimate) {
  auto eig = hermitian_eig(hermitian_part(estimate));
  ComplexVector v = eig.vectors.col(0);
  normalize_phase(v);
  return v;
}

// Tensor-train helpers for extract_mps. A contracted range [lo, hi] is held
// as a matrix with rows l * d^len + digits (lo most significant) and columns
// indexed by the right bond.
using Train = std::vector<std::vector<ComplexMatrix>>;

ComplexMatrix contract_range(const Train& train, int d, int lo, int hi) {
  const Index dl = train[static_cast<std::size_t>(lo)][0].rows();
  ComplexMatrix x(dl * d, train[static_cast<std::size_t>(lo)][0].cols());
  for (Index l = 0; l < dl; ++l) {
    for (int s = 0; s < d; ++s) x.row(l * d + s) = train[static_cast<std::size_t>(lo)][static_cast<std::size_t>(s)].row(l);
  }
  for (int k = lo + 1; k <= hi; ++k) {
    const auto& site = train[static_cast<std::size_t>(k)];
    const Index dr = site[0].cols();
    if (x.rows() * d * dr > kMaxContraction) throw Error(ErrorCode::TooLarge, "block contraction exceeds the size limit");
    ComplexMatrix next(x.rows() * d, dr);
    for (Index row = 0; row < x.rows(); ++row) {
      for (int s = 0; s < d; ++s) next.row(row * d + s) = x.row(row) * site[static_cast<std::size_t>(s)];
    }
    x = std::move(next);
  }
  return x;
}

void split_range(Train& train, int d, int lo, int hi, ComplexMatrix x, Index dl) {
  for (int k = lo; k < hi; ++k) {
    const Index rest = x.rows() / (dl * d);
    const Index dr = x.cols();
    ComplexMatrix y(dl * d, rest * dr);
    for (Index l = 0; l < dl; ++l) {
      for (int s = 0; s < d; ++s) {
        for (Index m = 0; m < rest; ++m) {
          y.row(l * d + s).segment(m * dr, dr) = x.row((l * d + s) * rest + m);
        }
      }
    }
    Eigen::BDCSVD<ComplexMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    Index keep = 0;
    const double cut = sv.size() > 0 ? kSvdDrop * sv[0] : 0.0;
    while (keep < sv.size() && sv[keep] > cut) ++keep;
    keep = std::max<Index>(keep, 1);
    auto& site = train[static_cast<std::size_t>(k)];
    for (int s = 0; s < d; ++s) {
      site[static_cast<std::size_t>(s)].resize(dl, keep);
      for (Index l = 0; l < dl; ++l) site[static_cast<std::size_t>(s)].row(l) = svd.matrixU().row(l * d + s).head(keep);
    }
    ComplexMatrix r = sv.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    x.resize(keep * rest, dr);
    for (Index c = 0; c < keep; ++c) {
      for (Index m = 0; m < rest; ++m) x.row(c * rest + m) = r.row(c).segment(m * dr, dr);
    }
    dl = keep;
  }
  auto& last = train[static_cast<std::size_t>(hi)];
  for (int s = 0; s < d; ++s) {
    last[static_cast<std::size_t>(s)].resize(dl, x.cols());
    for (Index l = 0; l < dl; ++l) last[static_cast<std::size_t>(s)].row(l) = x.row(l * d + s);
  }
}

}  // namespace

std::string_view to_string(Variant v) {
  return v == Variant::Exact ? "exact" : "closest";
}

Variant parse_variant(std::string_view s) {
  if (s == "exact") return Variant::Exact;
  if (s == "closest") return Variant::Closest;
  throw Error(ErrorCode::ParseError, "unknown variant '" + std::string(s) + "'");
}

double fidelity_drop_bound(Variant variant, double eta, int D, int M, int j) {
  const double scale = variant == Variant::Closest ? static_cast<double>(D) * D : 1.0;
  return 2.0 * std::sqrt(2.0 * eta * scale * std::ldexp(1.0, M - j));
}

LearnResult learn(const QuantumStateBackend& input, const LearnParams& params, const OracleMode& mode) {
  const int n = input.num_sites();
  const int d = input.d();
  if (params.D < 1) throw Error(ErrorCode::BadParameter, "bond dimension must be at least 1");
  if (!(params.epsilon > 0.0 && params.epsilon <= 1.0)) throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1]");
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 1)");

  LearnResult result;
  CircuitDescription& circuit = result.circuit;
  LearnReport& report = result.report;
  CircuitMetadata& meta = circuit.meta;
  circuit.n = n;
  circuit.d = d;
  meta.variant = params.variant;
  meta.oracle = mode;
  meta.seed = params.seed;
  meta.D = params.D;
  meta.epsilon = params.epsilon;
  meta.epsilon_used = params.epsilon;
  meta.delta = params.delta;
  meta.theta = params.theta;

  int p = 0;
  if (params.variant == Variant::Exact) {
    p = p_exact(d, params.D);
    if (p == 0) {
      p = 1;
      meta.deviations.push_back("p raised from 0 to 1 for D = 1");
    }
  } else if (!params.p_override) {
    const EpsilonChoice choice = select_epsilon(n, d, params.D, params.epsilon);
    const LambertSolution sol = solve_p_closest(n, d, params.D, choice.epsilon_prime);
    if (!sol.exists) throw Error(ErrorCode::PlanInfeasible, "no block size solves the closest-state constraint");
    p = sol.p_candidate;
    meta.epsilon_used = choice.epsilon_prime;
  }
  if (params.p_override) {
    if (*params.p_override < 1) throw Error(ErrorCode::BadParameter, "p override must be at least 1");
    p = *params.p_override;
    meta.deviations.push_back("block size overridden to p = " + std::to_string(p));
  }
  if (params.variant == Variant::Exact &&
      power(d, static_cast<std::size_t>(p)) < static_cast<Index>(params.D) * params.D) {
    throw Error(ErrorCode::PlanInfeasible, "d^p is smaller than D^2");
  }
  circuit.p = p;
  const double eps = meta.epsilon_used;
  const double tau = eps / 4.0;
  meta.tau = tau;
  const double block_delta = params.delta / n;

  auto charge = [&](double mu, int r, double accuracy) {
    mu = std::clamp(mu, 0.0, 1.0);
    if (params.variant == Variant::Exact) {
      return budget_rank_constrained(mu, params.D, d, r, accuracy, block_delta, params.constant);
    }
    return budget_general(mu, d, r, accuracy, block_delta, params.constant);
  };
  auto with_eta = [&](double eta) {
    OracleMode m = mode;
    if (!m.eta) m.eta = eta;
    return m;
  };

  QuantumStateBackend state = input;
  if (params.audit) result.audit.emplace().snapshots.push_back(state);

  if (n <= 2 * p) {
    circuit.trivial = true;
    meta.deviations.push_back("n <= 2p: tree skipped, whole register estimated directly");
  } else {
    circuit.plan = plan_layers(n, d, p);
    const LayerPlan& plan = circuit.plan;
    if (plan.s1_amended) meta.deviations.push_back("s1 amended from 0 to p");
    const double eta = params.variant == Variant::Exact ? eta_exact(eps, plan.M) : eta_closest(eps, p, params.D, n);
    meta.eta = eta;
    const OracleMode block_mode = with_eta(eta);

    for (int j = 1; j <= plan.M; ++j) {
      const auto& layer = plan.layers[static_cast<std::size_t>(j - 1)];
      LayerRecord record;
      record.j = j;
      record.fidelity_drop_bound = fidelity_drop_bound(params.variant, eta, params.D, plan.M, j);
      auto& unitaries = circuit.unitaries.emplace_back(layer.size());
      for (std::size_t bi = 0; bi < layer.size(); ++bi) {
        const PlanBlock& block = layer[bi];
        if (!block.acted) continue;
        const int i = static_cast<int>(bi) + 1;
        const int y = static_cast<int>(block.support.size());
        const ComplexMatrix sigma = state.block_state(block.support);
        const TomographyOutcome est =
            estimate_reduced(sigma, d, block_mode, static_cast<std::uint64_t>(j) * kLayerStream + static_cast<std::uint64_t>(i));
        const std::uint64_t seed = block_seed(params.seed, j, i);
        const Disentangler u = params.variant == Variant::Exact
                                   ? build_rank_capped(est.estimate, d, static_cast<Index>(params.D) * params.D, p, seed)
                                   : build_threshold(est.estimate, d, eta, seed);
        BlockRecord br;
        br.i = i;
        br.support = block.support;
        br.projected = block.projected;
        br.success_mass = sigma.trace().real();
        br.trace_distance = trace_norm(est.estimate - sigma);
        br.selected = static_cast<int>(u.selected.cols());
        br.copies = charge(br.success_mass, y, eta);
        const ComplexMatrix lost = ComplexMatrix::Identity(sigma.rows(), sigma.cols()) - kept_projector(u, y - block.projected);
        if (params.variant == Variant::Exact) {
          br.leakage = (lost * sigma).trace().real();
        } else {
          br.leakage = operator_norm(lost * sigma * lost);
        }
        report.copies_used += br.copies;
        state.apply(block.support, u.unitary);
        unitaries[bi] = u.unitary;
        record.blocks.push_back(std::move(br));
      }
      state.project_out(layer_projected(plan, j));
      record.success_mass = state.trace();
      if (result.audit) result.audit->snapshots.push_back(state);
      report.per_layer.push_back(std::move(record));
    }
  }

  circuit.residual_sites = state.labels();
  const ComplexMatrix final_state = state.density();
  const TomographyOutcome est =
      estimate_reduced(final_state, d, with_eta(tau), static_cast<std::uint64_t>(circuit.depth() + 1) * kLayerStream);
  circuit.residual = top_eigenvector(est.estimate);
  report.final_success_mass = final_state.trace().real();
  report.final_trace_distance = trace_norm(est.estimate - final_state);
  report.final_copies = charge(report.final_success_mass, state.num_sites(), tau);
  report.copies_used += report.final_copies;
  report.deviations = meta.deviations;

  report.final_fidelity = input.expectation(reconstruct_state(circuit));
  return result;
}

std::vector<int> remaining_sites(const CircuitDescription& circuit, int j) {
  if (j < 0 || j > circuit.depth()) throw Error(ErrorCode::OutOfRange, "layer index out of range");
  std::vector<int> sites(static_cast<std::size_t>(circuit.n));
  std::iota(sites.begin(), sites.end(), 0);
  for (int a = 1; a <= j; ++a) {
    const auto projected = layer_projected(circuit.plan, a);
    std::erase_if(sites, [&](int s) { return std::binary_search(projected.begin(), projected.end(), s); });
  }
  return sites;
}

void validate(const CircuitDescription& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::MalformedCircuit, msg); };
  if (c.d < 2 || c.n < 1 || c.p < 1) fail("bad circuit dimensions");
  if (c.trivial) {
    if (!c.unitaries.empty()) fail("trivial circuit carries unitaries");
    std::vector<int> all(static_cast<std::size_t>(c.n));
    std::iota(all.begin(), all.end(), 0);
    if (c.residual_sites != all) fail("trivial circuit residual must cover every site");
  } else {
    LayerPlan expected;
    try {
      expected = plan_layers(c.n, c.d, c.p);
    } catch (const Error& e) {
      fail(std::string("plan cannot be rebuilt: ") + e.what());
    }
    if (expected.layers.size() != c.plan.layers.size()) fail("layer count does not match the plan");
    for (std::size_t j = 0; j < expected.layers.size(); ++j) {
      const auto& want = expected.layers[j];
      const auto& got = c.plan.layers[j];
      if (want.size() != got.size()) fail("block count does not match the plan");
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (want[i].support != got[i].support || want[i].projected != got[i].projected ||
            want[i].acted != got[i].acted || want[i].carried != got[i].carried) {
          fail("block support does not match the plan");
        }
      }
    }
    if (c.unitaries.size() != expected.layers.size()) fail("unitary layer count does not match the plan");
    for (std::size_t j = 0; j < expected.layers.size(); ++j) {
      if (c.unitaries[j].size() != expected.layers[j].size()) fail("unitary count does not match the plan");
      for (std::size_t i = 0; i < expected.layers[j].size(); ++i) {
        const auto& u = c.unitaries[j][i];
        const auto& block = expected.layers[j][i];
        if (!block.acted) {
          if (u.size() != 0) fail("pass-through block carries a unitary");
          continue;
        }
        const Index dim = power(c.d, block.support.size());
        if (u.rows() != dim || u.cols() != dim) fail("unitary shape does not match its support");
        if (max_abs(u.adjoint() * u - ComplexMatrix::Identity(dim, dim)) > 1e-8) fail("block operator is not unitary");
      }
    }
    if (c.residual_sites != remaining_sites(c, c.depth())) fail("residual sites do not match the plan");
  }
  if (c.residual.size() != power(c.d, c.residual_sites.size())) fail("residual has the wrong length");
  if (std::abs(c.residual.norm() - 1.0) > 1e-8) fail("residual is not a unit vector");
}

ComplexVector reconstruct_state(const CircuitDescription& circuit) {
  validate(circuit);
  return lift(circuit.residual, circuit, circuit.depth());
}

ComplexVector residual_projection(const ComplexVector& phi, const CircuitDescription& circuit, int j) {
  if (j < 0 || j > circuit.depth()) throw Error(ErrorCode::OutOfRange, "layer index out of range");
  if (phi.size() != power(circuit.d, static_cast<std::size_t>(circuit.n))) {
    throw Error(ErrorCode::DimensionMismatch, "vector does not match the register");
  }
  ComplexVector v = phi;
  std::vector<int> sites = remaining_sites(circuit, 0);
  for (int a = 1; a <= j; ++a) {
    const auto& layer = circuit.plan.layers[static_cast<std::size_t>(a - 1)];
    const int k = static_cast<int>(sites.size());
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!layer[i].acted) continue;
      apply_local(v, circuit.d, k, positions_in(sites, layer[i].support),
                  circuit.unitaries[static_cast<std::size_t>(a - 1)][i]);
    }
    const auto projected = layer_projected(circuit.plan, a);
    v = project_zero_remove(v, circuit.d, k, positions_in(sites, projected));
    std::erase_if(sites, [&](int s) { return std::binary_search(projected.begin(), projected.end(), s); });
  }
  return v;
}

FactoredDensity stepwise_state(const CircuitDescription& circuit, const std::optional<AuditTrail>& audit, int j) {
  if (!audit) throw Error(ErrorCode::AuditDisabled, "learn ran without audit snapshots");
  if (j < 0 || j > circuit.depth() || static_cast<std::size_t>(j) >= audit->snapshots.size()) {
    throw Error(ErrorCode::OutOfRange, "layer index out of range");
  }
  const ComplexMatrix f = audit->snapshots[static_cast<std::size_t>(j)].factor();
  FactoredDensity out;
  out.factor.resize(power(circuit.d, static_cast<std::size_t>(circuit.n)), f.cols());
  for (Index c = 0; c < f.cols(); ++c) out.factor.col(c) = lift(f.col(c), circuit, j);
  return out;
}

double min_eigenvalue_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::DimensionMismatch, "factors act on different spaces");
  const Index dim = a.rows();
  if (a.cols() + b.cols() >= dim) {
    return hermitian_eig(hermitian_part(a * a.adjoint() - b * b.adjoint())).values.minCoeff();
  }
  ComplexMatrix joint(dim, a.cols() + b.cols());
  joint << a, b;
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(joint);
  qr.setThreshold(1e-13);
  const Index rank = qr.rank();
  if (rank == 0) return 0.0;
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, rank);
  const ComplexMatrix qa = q.adjoint() * a;
  const ComplexMatrix qb = q.adjoint() * b;
  const double inside = hermitian_eig(hermitian_part(qa * qa.adjoint() - qb * qb.adjoint())).values.minCoeff();
  return rank < dim ? std::min(inside, 0.0) : inside;
}

double extraction_bond_bound(const CircuitDescription& circuit) {
  const double m1 = circuit.depth() + 1;
  return std::pow(static_cast<double>(circuit.d), m1) * std::pow(static_cast<double>(circuit.meta.D), 2.0 * m1);
}

MatrixProductState extract_mps(const CircuitDescription& circuit) {
  validate(circuit);
  const int n = circuit.n;
  const int d = circuit.d;
  Train train(static_cast<std::size_t>(n), std::vector<ComplexMatrix>(static_cast<std::size_t>(d), ComplexMatrix::Zero(1, 1)));
  for (auto& site : train) site[0](0, 0) = 1.0;

  const int lo = circuit.residual_sites.front();
  const int hi = circuit.residual_sites.back();
  if (hi - lo + 1 != static_cast<int>(circuit.residual_sites.size())) {
    throw Error(ErrorCode::MalformedCircuit, "residual sites are not contiguous");
  }
  split_range(train, d, lo, hi, circuit.residual, 1);

  for (int a = circuit.depth(); a >= 1; --a) {
    const auto& layer = circuit.plan.layers[static_cast<std::size_t>(a - 1)];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (!layer[i].acted) continue;
      const auto& support = layer[i].support;
      const int first = support.front();
      const int last = support.back();
      const int len = last - first + 1;
      const Index span_dim = power(d, static_cast<std::size_t>(len));
      const Index dl = train[static_cast<std::size_t>(first)][0].rows();
      ComplexMatrix x = contract_range(train, d, first, last);
      std::vector<int> rel;
      for (int s : support) rel.push_back(s - first);
      const ComplexMatrix udag = circuit.unitaries[static_cast<std::size_t>(a - 1)][i].adjoint();
      ComplexVector column(span_dim);
      for (Index l = 0; l < dl; ++l) {
        for (Index r = 0; r < x.cols(); ++r) {
          column = x.col(r).segment(l * span_dim, span_dim);
          apply_local(column, d, len, rel, udag);
          x.col(r).segment(l * span_dim, span_dim) = column;
        }
      }
      split_range(train, d, first, last, std::move(x), dl);
    }
  }

  MatrixProductState mps;
  mps.n = n;
  mps.d = d;
  mps.boundary = Boundary::Open;
  mps.tensors = std::move(train);
  return mps;
}

}  // namespace mpslearn
