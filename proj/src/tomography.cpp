#include "mpslearn/tomography.hpp"

#include "mpslearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mpslearn {

std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::Exact: return "exact";
    case OracleKind::BoundedNoise: return "noise";
    case OracleKind::FiniteSample: return "sample";
  }
  return "exact";
}

OracleKind parse_oracle_kind(std::string_view s) {
  if (s == "exact") return OracleKind::Exact;
  if (s == "noise" || s == "bounded_noise") return OracleKind::BoundedNoise;
  if (s == "sample" || s == "finite_sample") return OracleKind::FiniteSample;
  throw Error(ErrorCode::BadParameter, "unknown oracle mode '" + std::string(s) + "'");
}

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kSampleStream = 0x73616d706cULL;
constexpr std::uint64_t kBasisStream = 0x6261736573ULL;

bool is_prime(int d) {
  if (d < 2) return false;
  for (int q = 2; q * q <= d; ++q)
    if (d % q == 0) return false;
  return true;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int qudit_count(Index dim, int d) {
  int y = 0;
  Index v = 1;
  while (v < dim) {
    v *= d;
    ++y;
  }
  if (v != dim) throw Error(ErrorCode::DimensionMismatch, "block dimension is not a power of d");
  return y;
}

ComplexMatrix bounded_noise(const ComplexMatrix& sigma, const OracleMode& mode, std::uint64_t stream) {
  if (!mode.eta) throw Error(ErrorCode::BadParameter, "bounded-noise oracle needs eta");
  const double eta = *mode.eta;
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::BadParameter, "eta must lie in (0, 1)");
  const Index dim = sigma.rows();
  Rng rng = make_rng(mode.seed, {kNoiseStream, stream});
  ComplexMatrix delta = hermitian_part(gaussian_matrix(dim, dim, rng));
  delta -= (delta.trace() / static_cast<double>(dim)) * ComplexMatrix::Identity(dim, dim);
  const double size = trace_norm(delta);
  if (size == 0.0) return sigma;
  ComplexMatrix est = sigma + (eta / size) * delta;
  if (mode.project_psd) {
    auto eig = hermitian_eig(hermitian_part(est));
    RealVector clipped = eig.values.cwiseMax(0.0);
    const double mass = clipped.sum();
    const double target = sigma.trace().real();
    if (mass > 0.0) clipped *= target / mass;
    ComplexMatrix psd = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
    // Mix back towards sigma until the error budget holds again.
    const double err = trace_norm(psd - sigma);
    const double t = err > eta ? eta / err : 1.0;
    est = sigma + t * (psd - sigma);
  }
  return hermitian_part(est);
}

ComplexMatrix finite_sample(const ComplexMatrix& sigma, int d, const OracleMode& mode, std::uint64_t stream,
                            double& mass_estimate) {
  if (mode.copies < 1) throw Error(ErrorCode::BadParameter, "finite-sample oracle needs copies >= 1");
  const Index dim = sigma.rows();
  const int y = qudit_count(dim, d);
  if (y > 6) throw Error(ErrorCode::TooLarge, "finite-sample tomography limited to 6 qudits");
  const double mu = std::clamp(sigma.trace().real(), 0.0, 1.0);
  const std::uint64_t kept = simulate_postselect(mode.copies, mu, mode.seed ^ (stream * 0x9e3779b97f4a7c15ULL));
  mass_estimate = static_cast<double>(kept) / static_cast<double>(mode.copies);
  if (kept == 0 || mu == 0.0) return ComplexMatrix::Zero(dim, dim);

  const ComplexMatrix rho = hermitian_part(sigma / sigma.trace().real());
  const auto bases = measurement_bases(d, mode.seed);
  const auto duals = dual_frame(bases);
  const int per_qudit = static_cast<int>(bases.size());
  const auto settings = static_cast<std::uint64_t>(ipow(static_cast<std::uint64_t>(per_qudit), static_cast<unsigned>(y)));

  Rng rng = make_rng(mode.seed, {kSampleStream, stream});
  ComplexMatrix est = ComplexMatrix::Zero(dim, dim);
  std::vector<int> choice(static_cast<std::size_t>(y));
  for (std::uint64_t s = 0; s < settings; ++s) {
    const std::uint64_t shots = kept / settings + (s < kept % settings ? 1 : 0);
    if (shots == 0) continue;
    std::uint64_t rest = s;
    for (int k = y - 1; k >= 0; --k) {
      choice[static_cast<std::size_t>(k)] = static_cast<int>(rest % per_qudit);
      rest /= per_qudit;
    }
    ComplexMatrix b = bases[static_cast<std::size_t>(choice[0])];
    for (int k = 1; k < y; ++k) b = kron(b, bases[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])]);
    RealVector probs = (b.adjoint() * rho * b).diagonal().real().cwiseMax(0.0);
    probs /= probs.sum();

    // Multinomial draw as a chain of conditional binomials.
    std::uint64_t left = shots;
    double remaining = 1.0;
    for (Index o = 0; o < dim && left > 0; ++o) {
      std::uint64_t count = left;
      if (o + 1 < dim) {
        const double q = remaining > 0.0 ? std::clamp(probs[o] / remaining, 0.0, 1.0) : 0.0;
        count = std::binomial_distribution<std::uint64_t>(left, q)(rng);
      }
      remaining -= probs[o];
      left -= count;
      if (count == 0) continue;
      Index rem = o;
      std::vector<int> outcome(static_cast<std::size_t>(y));
      for (int k = y - 1; k >= 0; --k) {
        outcome[static_cast<std::size_t>(k)] = static_cast<int>(rem % d);
        rem /= d;
      }
      auto dual_of = [&](int k) -> const ComplexMatrix& {
        return duals[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)] * d + outcome[static_cast<std::size_t>(k)])];
      };
      ComplexMatrix term = dual_of(0);
      for (int k = 1; k < y; ++k) term = kron(term, dual_of(k));
      est += (static_cast<double>(count) / static_cast<double>(shots)) * term;
    }
  }
  return hermitian_part(mass_estimate * est);
}

}  // namespace

std::vector<ComplexMatrix> measurement_bases(int d, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorCode::BadParameter, "local dimension must be at least 2");
  std::vector<ComplexMatrix> bases;
  bases.push_back(ComplexMatrix::Identity(d, d));
  if (d == 2) {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix x(2, 2);
    x << s, s, s, -s;
    ComplexMatrix y(2, 2);
    y << s, s, Complex(0, s), Complex(0, -s);
    bases.push_back(x);
    bases.push_back(y);
  } else if (is_prime(d)) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
      ComplexMatrix b(d, d);
      for (int col = 0; col < d; ++col) {
        for (int j = 0; j < d; ++j) {
          const double phase = 2.0 * std::numbers::pi * static_cast<double>((a * j * j + col * j) % d) / d;
          b(j, col) = norm * std::polar(1.0, phase);
        }
      }
      bases.push_back(b);
    }
  } else {
    Rng rng = make_rng(seed, {kBasisStream, static_cast<std::uint64_t>(d)});
    for (int a = 0; a < d; ++a) bases.push_back(random_unitary(d, rng));
  }
  return bases;
}

std::vector<ComplexMatrix> dual_frame(const std::vector<ComplexMatrix>& bases) {
  const Index d = bases.front().rows();
  const Index effects = static_cast<Index>(bases.size()) * d;
  ComplexMatrix phi(effects, d * d);
  for (std::size_t b = 0; b < bases.size(); ++b) {
    for (Index o = 0; o < d; ++o) {
      const ComplexMatrix p = bases[b].col(o) * bases[b].col(o).adjoint();
      // Row maps vec(X) (column-major) to Tr(P X).
      phi.row(static_cast<Index>(b) * d + o) = p.conjugate().reshaped().transpose();
    }
  }
  const ComplexMatrix pinv = Eigen::CompleteOrthogonalDecomposition<ComplexMatrix>(phi).pseudoInverse();
  std::vector<ComplexMatrix> duals;
  for (Index r = 0; r < effects; ++r) duals.push_back(pinv.col(r).reshaped(d, d));
  return duals;
}

TomographyOutcome estimate_reduced(const ComplexMatrix& sigma, int d, const OracleMode& mode,
                                   std::uint64_t stream) {
  if (sigma.rows() != sigma.cols()) throw Error(ErrorCode::NonSquare, "estimate_reduced: block state not square");
  TomographyOutcome out;
  out.mode = mode;
  const ComplexMatrix exact = hermitian_part(sigma);
  out.success_mass = exact.trace().real();
  switch (mode.kind) {
    case OracleKind::Exact:
      out.estimate = exact;
      break;
    case OracleKind::BoundedNoise:
      out.estimate = bounded_noise(exact, mode, stream);
      break;
    case OracleKind::FiniteSample: {
      double mass = 0.0;
      out.estimate = finite_sample(exact, d, mode, stream, mass);
      out.success_mass = mass;
      out.copies_used = mode.copies;
      break;
    }
  }
  return out;
}

namespace {

void check_block(std::span<const int> block, int num_sites) {
  if (block.empty()) throw Error(ErrorCode::BlockOutOfRange, "empty block");
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (block[k] < 0 || block[k] >= num_sites || (k > 0 && block[k] != block[k - 1] + 1)) {
      throw Error(ErrorCode::BlockOutOfRange, "block is not a contiguous range of the register");
    }
  }
}

}  // namespace

TomographyOutcome estimate_block(const ComplexVector& state, int d, int num_sites, std::span<const int> block,
                                 const OracleMode& mode, std::uint64_t stream) {
  check_block(block, num_sites);
  return estimate_reduced(reduced_from_vector(state, d, num_sites, block), d, mode, stream);
}

TomographyOutcome estimate_block(const ComplexMatrix& rho, int d, int num_sites, std::span<const int> block,
                                 const OracleMode& mode, std::uint64_t stream) {
  check_block(block, num_sites);
  std::vector<int> dims(static_cast<std::size_t>(num_sites), d);
  return estimate_reduced(partial_trace(rho, dims, block), d, mode, stream);
}

namespace {

void check_budget_args(double mu, int d, int r, double eta, double delta, double constant) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorCode::BadParameter, "mu must lie in [0, 1]");
  if (d < 2 || r < 0) throw Error(ErrorCode::BadParameter, "need d >= 2 and r >= 0");
  if (!(eta > 0.0)) throw Error(ErrorCode::BadParameter, "eta must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 1)");
  if (!(constant > 0.0)) throw Error(ErrorCode::BadParameter, "constant must be positive");
}

std::uint64_t round_up(double value) {
  if (!std::isfinite(value) || value >= 1.8e19) throw Error(ErrorCode::BadParameter, "budget overflows");
  return static_cast<std::uint64_t>(std::ceil(value));
}

}  // namespace

std::uint64_t budget_rank_constrained(double mu, int D, int d, int r_minus_i, double eta, double delta,
                                      double constant) {
  check_budget_args(mu, d, r_minus_i, eta, delta, constant);
  if (D < 1) throw Error(ErrorCode::BadParameter, "D must be at least 1");
  const double dims = static_cast<double>(D) * D * std::pow(static_cast<double>(d), r_minus_i);
  return round_up(constant * mu * dims * std::log(1.0 / delta) / (eta * eta));
}

std::uint64_t budget_general(double mu, int d, int r_minus_i, double eta, double delta, double constant) {
  check_budget_args(mu, d, r_minus_i, eta, delta, constant);
  const double dims = std::pow(static_cast<double>(d), 2.0 * r_minus_i);
  return round_up(constant * mu * dims * std::log(1.0 / delta) / (eta * eta));
}

std::uint64_t simulate_postselect(std::uint64_t m, double mu, std::uint64_t seed) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw Error(ErrorCode::BadParameter, "mu must lie in [0, 1]");
  if (mu == 0.0 || m == 0) return 0;
  if (mu == 1.0) return m;
  Rng rng = make_rng(seed, {0x706f7374ULL});
  return std::binomial_distribution<std::uint64_t>(m, mu)(rng);
}

}  // namespace mpslearn
