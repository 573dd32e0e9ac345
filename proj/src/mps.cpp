#include "mpslearn/mps.hpp"

#include "mpslearn/errors.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace mpslearn {

std::string_view to_string(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::Random: return "random";
    case StateKind::Ghz: return "ghz";
    case StateKind::Product: return "product";
    case StateKind::WState: return "w-state";
  }
  return "random";
}

Boundary parse_boundary(std::string_view s) {
  if (s == "open") return Boundary::Open;
  if (s == "periodic") return Boundary::Periodic;
  throw Error(ErrorCode::InvalidSpec, "unknown boundary '" + std::string(s) + "'");
}

StateKind parse_state_kind(std::string_view s) {
  if (s == "random") return StateKind::Random;
  if (s == "ghz") return StateKind::Ghz;
  if (s == "product") return StateKind::Product;
  if (s == "w-state" || s == "w") return StateKind::WState;
  throw Error(ErrorCode::InvalidSpec, "unknown state kind '" + std::string(s) + "'");
}

Index MatrixProductState::bond(int k) const {
  if (k < n) return tensors[static_cast<std::size_t>(k)][0].rows();
  return tensors[static_cast<std::size_t>(n - 1)][0].cols();
}

Index MatrixProductState::max_bond() const {
  Index best = 1;
  for (int k = 0; k <= n; ++k) best = std::max(best, bond(k));
  return best;
}

namespace {

// min(cap, d^k) without overflow.
Index capped_power(int d, int k, Index cap) {
  Index v = 1;
  for (int i = 0; i < k && v < cap; ++i) v *= d;
  return std::min(v, cap);
}

Index open_bond(int n, int d, int D, int k) {
  return std::min(capped_power(d, k, D), capped_power(d, n - k, D));
}

void check_spec(const StateSpec& spec) {
  if (spec.n < 2) throw Error(ErrorCode::InvalidSpec, "n must be at least 2");
  if (spec.d < 2) throw Error(ErrorCode::InvalidSpec, "d must be at least 2");
  if (spec.D < 1) throw Error(ErrorCode::InvalidSpec, "D must be at least 1");
  if ((spec.kind == StateKind::Ghz || spec.kind == StateKind::WState) && spec.D < 2) {
    throw Error(ErrorCode::InvalidSpec, std::string(to_string(spec.kind)) + " needs D >= 2");
  }
}

ComplexMatrix kron_conj(const ComplexMatrix& a) {
  ComplexMatrix out(a.rows() * a.rows(), a.cols() * a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = a(i, j) * a.conjugate();
  return out;
}

// Structured open-chain tensors with bond 2 in the bulk.
MatrixProductState structured_open(const StateSpec& spec) {
  const int n = spec.n;
  const int d = spec.d;
  MatrixProductState mps{n, d, Boundary::Open, {}};
  mps.tensors.assign(static_cast<std::size_t>(n), {});
  for (int k = 0; k < n; ++k) {
    const Index left = k == 0 ? 1 : 2;
    const Index right = k == n - 1 ? 1 : 2;
    auto& site = mps.tensors[static_cast<std::size_t>(k)];
    site.assign(static_cast<std::size_t>(d), ComplexMatrix::Zero(left, right));
    if (spec.kind == StateKind::Ghz) {
      for (int i = 0; i < 2; ++i) site[i](left == 1 ? 0 : i, right == 1 ? 0 : i) = 1.0;
    } else {
      // Bond index 1 records that the single excitation already occurred.
      if (k == 0) {
        site[0](0, 0) = 1.0;
        site[1](0, 1) = 1.0;
      } else if (k == n - 1) {
        site[0](1, 0) = 1.0;
        site[1](0, 0) = 1.0;
      } else {
        site[0](0, 0) = site[0](1, 1) = 1.0;
        site[1](0, 1) = 1.0;
      }
    }
  }
  return mps;
}

// Pads the boundary tensors of an open chain so the trace picks bond index 0.
MatrixProductState to_periodic(MatrixProductState mps) {
  const Index b = mps.max_bond();
  mps.boundary = Boundary::Periodic;
  for (auto& a : mps.tensors.front()) {
    ComplexMatrix padded = ComplexMatrix::Zero(b, a.cols());
    padded.topRows(a.rows()) = a;
    a = padded;
  }
  for (auto& a : mps.tensors.back()) {
    ComplexMatrix padded = ComplexMatrix::Zero(a.rows(), b);
    padded.leftCols(a.cols()) = a;
    a = padded;
  }
  return mps;
}

void normalize(MatrixProductState& mps) {
  const double nrm2 = norm_squared(mps);
  if (!(nrm2 > 0.0) || !std::isfinite(nrm2)) {
    throw Error(ErrorCode::InvalidSpec, "state has zero or non-finite norm");
  }
  const double scale = std::pow(nrm2, -0.5 / mps.n);
  for (auto& site : mps.tensors)
    for (auto& a : site) a *= scale;
}

}  // namespace

void validate(const MatrixProductState& mps) {
  if (mps.n < 1 || mps.d < 2 || static_cast<int>(mps.tensors.size()) != mps.n) {
    throw Error(ErrorCode::InvalidSpec, "MPS site count or local dimension invalid");
  }
  for (int k = 0; k < mps.n; ++k) {
    const auto& site = mps.tensors[static_cast<std::size_t>(k)];
    if (static_cast<int>(site.size()) != mps.d) {
      throw Error(ErrorCode::InvalidSpec, "site " + std::to_string(k) + " has wrong physical dimension");
    }
    for (const auto& a : site) {
      if (a.rows() != site[0].rows() || a.cols() != site[0].cols()) {
        throw Error(ErrorCode::InvalidSpec, "site " + std::to_string(k) + " has ragged matrices");
      }
    }
    if (k > 0 && mps.tensors[static_cast<std::size_t>(k - 1)][0].cols() != site[0].rows()) {
      throw Error(ErrorCode::InvalidSpec, "bond mismatch before site " + std::to_string(k));
    }
  }
  const Index first = mps.tensors.front()[0].rows();
  const Index last = mps.tensors.back()[0].cols();
  if (mps.boundary == Boundary::Open && (first != 1 || last != 1)) {
    throw Error(ErrorCode::InvalidSpec, "open chain must have unit boundary bonds");
  }
  if (mps.boundary == Boundary::Periodic && first != last) {
    throw Error(ErrorCode::InvalidSpec, "periodic chain must close its bond");
  }
}

MatrixProductState random_mps(const StateSpec& spec) {
  check_spec(spec);
  MatrixProductState mps;
  if (spec.kind == StateKind::Ghz || spec.kind == StateKind::WState) {
    mps = structured_open(spec);
    if (spec.boundary == Boundary::Periodic) mps = to_periodic(std::move(mps));
  } else {
    const int D = spec.kind == StateKind::Product ? 1 : spec.D;
    Rng rng = make_rng(spec.seed, {static_cast<std::uint64_t>(spec.kind)});
    mps = MatrixProductState{spec.n, spec.d, spec.boundary, {}};
    mps.tensors.resize(static_cast<std::size_t>(spec.n));
    for (int k = 0; k < spec.n; ++k) {
      const bool open = spec.boundary == Boundary::Open;
      const Index left = open ? open_bond(spec.n, spec.d, D, k) : D;
      const Index right = open ? open_bond(spec.n, spec.d, D, k + 1) : D;
      for (int i = 0; i < spec.d; ++i) {
        mps.tensors[static_cast<std::size_t>(k)].push_back(gaussian_matrix(left, right, rng));
      }
    }
  }
  normalize(mps);
  return mps;
}

double norm_squared(const MatrixProductState& mps) {
  validate(mps);
  const Index b0 = mps.bond(0);
  ComplexMatrix acc = ComplexMatrix::Identity(b0 * b0, b0 * b0);
  for (const auto& site : mps.tensors) {
    ComplexMatrix t = ComplexMatrix::Zero(site[0].rows() * site[0].rows(), site[0].cols() * site[0].cols());
    for (const auto& a : site) t += kron_conj(a);
    acc = acc * t;
  }
  return acc.trace().real();
}

ComplexVector expand(const MatrixProductState& mps) {
  validate(mps);
  Index total = 1;
  for (int k = 0; k < mps.n; ++k) {
    total *= mps.d;
    if (total > kMaxAmplitudes) {
      throw Error(ErrorCode::TooLarge, "expansion exceeds " + std::to_string(kMaxAmplitudes) + " amplitudes");
    }
  }
  const Index b0 = mps.bond(0);
  // Row block c holds the partial product for prefix index c.
  ComplexMatrix cur = ComplexMatrix::Identity(b0, b0);
  Index count = 1;
  for (const auto& site : mps.tensors) {
    const Index right = site[0].cols();
    ComplexMatrix next(count * mps.d * b0, right);
    for (Index c = 0; c < count; ++c) {
      for (int i = 0; i < mps.d; ++i) {
        next.middleRows((c * mps.d + i) * b0, b0).noalias() = cur.middleRows(c * b0, b0) * site[i];
      }
    }
    cur.swap(next);
    count *= mps.d;
  }
  ComplexVector out(count);
  for (Index c = 0; c < count; ++c) out[c] = cur.middleRows(c * b0, b0).trace();
  return out;
}

int schmidt_rank(const ComplexVector& state, int d, int n, int cut, double tol) {
  if (cut < 1 || cut >= n) {
    throw Error(ErrorCode::BadCut, "cut " + std::to_string(cut) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  std::vector<int> axes;
  if (cut <= n - cut) {
    for (int k = 0; k < cut; ++k) axes.push_back(k);
  } else {
    for (int k = cut; k < n; ++k) axes.push_back(k);
  }
  return numerical_rank(reduced_from_vector(state, d, n, axes), tol);
}

int schmidt_rank(const MatrixProductState& mps, int cut, double tol) {
  return schmidt_rank(expand(mps), mps.d, mps.n, cut, tol);
}

namespace {

void check_block(std::span<const int> block, int n) {
  if (block.empty()) throw Error(ErrorCode::DimensionMismatch, "block_rdm: empty block");
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (block[k] < 0 || block[k] >= n) throw Error(ErrorCode::DimensionMismatch, "block_rdm: site out of range");
    if (k > 0 && block[k] != block[k - 1] + 1) {
      throw Error(ErrorCode::NonContiguousSupport, "block_rdm: block must be contiguous");
    }
  }
}

}  // namespace

ComplexMatrix block_rdm(const ComplexVector& state, int d, int n, std::span<const int> block) {
  check_block(block, n);
  return reduced_from_vector(state, d, n, block);
}

ComplexMatrix block_rdm(const ComplexMatrix& rho, int d, int n, std::span<const int> block) {
  check_block(block, n);
  std::vector<int> dims(static_cast<std::size_t>(n), d);
  return hermitian_part(partial_trace(rho, dims, block));
}

std::uint64_t mps_parameter_count(int n, int d, int D, Boundary boundary) {
  std::uint64_t total = 0;
  for (int k = 0; k < n; ++k) {
    const auto left = static_cast<std::uint64_t>(boundary == Boundary::Open ? open_bond(n, d, D, k) : D);
    const auto right = static_cast<std::uint64_t>(boundary == Boundary::Open ? open_bond(n, d, D, k + 1) : D);
    total += static_cast<std::uint64_t>(d) * left * right;
  }
  return total;
}

void write_mps(std::ostream& out, const MatrixProductState& mps) {
  validate(mps);
  out << "mpslearn-mps 1\n";
  out << "n " << mps.n << "\nd " << mps.d << "\nboundary " << to_string(mps.boundary) << '\n';
  for (int k = 0; k < mps.n; ++k) {
    const auto& site = mps.tensors[static_cast<std::size_t>(k)];
    out << "site " << k << ' ' << site[0].rows() << ' ' << site[0].cols() << '\n';
    for (const auto& a : site) detail::write_matrix(out, a);
  }
  out << "end\n";
}

MatrixProductState read_mps(std::istream& in) {
  detail::expect_token(in, "mpslearn-mps");
  const int version = detail::read_value<int>(in, "format version");
  if (version != 1) throw Error(ErrorCode::ParseError, "unsupported MPS format version " + std::to_string(version));
  MatrixProductState mps;
  detail::expect_token(in, "n");
  mps.n = detail::read_value<int>(in, "n");
  detail::expect_token(in, "d");
  mps.d = detail::read_value<int>(in, "d");
  detail::expect_token(in, "boundary");
  const auto boundary = detail::read_value<std::string>(in, "boundary");
  try {
    mps.boundary = parse_boundary(boundary);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (mps.n < 1 || mps.n > 4096 || mps.d < 2 || mps.d > 64) {
    throw Error(ErrorCode::ParseError, "implausible n or d in MPS header");
  }
  for (int k = 0; k < mps.n; ++k) {
    detail::expect_token(in, "site");
    if (detail::read_value<int>(in, "site index") != k) throw Error(ErrorCode::ParseError, "sites out of order");
    const auto rows = detail::read_value<Index>(in, "rows");
    const auto cols = detail::read_value<Index>(in, "cols");
    if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096) throw Error(ErrorCode::ParseError, "bad bond size");
    std::vector<ComplexMatrix> site;
    for (int i = 0; i < mps.d; ++i) site.push_back(detail::read_matrix(in, rows, cols));
    mps.tensors.push_back(std::move(site));
  }
  detail::expect_token(in, "end");
  try {
    validate(mps);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return mps;
}

void save_mps(const std::string& path, const MatrixProductState& mps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  write_mps(out, mps);
}

MatrixProductState load_mps(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_mps(in);
}

}  // namespace mpslearn
