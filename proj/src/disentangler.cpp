#include "mpslearn/disentangler.hpp"

#include "mpslearn/errors.hpp"

#include <algorithm>
#include <string>

namespace mpslearn {

namespace {

constexpr double kThresholdFloor = 1e-12;

int block_qudits(const ComplexMatrix& sigma, int d) {
  if (sigma.rows() != sigma.cols()) throw Error(ErrorCode::NonSquare, "block estimate is not square");
  if (d < 2) throw Error(ErrorCode::BadParameter, "local dimension must be at least 2");
  int y = 0;
  Index dim = 1;
  while (dim < sigma.rows()) {
    dim *= d;
    ++y;
  }
  if (dim != sigma.rows()) throw Error(ErrorCode::DimensionMismatch, "block dimension is not a power of d");
  return y;
}

Disentangler assemble(const EigenDecomposition& eig, Index keep, int d, int y, int kept_qudits,
                      std::uint64_t seed) {
  const Index dim = eig.vectors.rows();
  Disentangler out;
  out.d = d;
  out.y = y;
  out.kept_qudits = kept_qudits;
  out.kept_dim = static_cast<Index>(ipow(static_cast<std::uint64_t>(d), static_cast<unsigned>(kept_qudits)));
  out.selected = eig.vectors.leftCols(keep);
  out.spectrum = eig.values;
  // Row r of U is <phi_r|.
  out.unitary = gram_schmidt_extend(out.selected, dim, seed).adjoint();
  return out;
}

}  // namespace

int digits_for(Index m, int d) {
  int t = 0;
  Index cap = 1;
  while (cap < m) {
    cap *= d;
    ++t;
  }
  return t;
}

Index idx(std::span<const int> a, Index j, int d, int y, int p) {
  if (d < 2 || p < 0 || y < p || static_cast<int>(a.size()) != y - p) {
    throw Error(ErrorCode::OutOfRange, "idx: digit count must equal y - p");
  }
  const Index block = static_cast<Index>(ipow(static_cast<std::uint64_t>(d), static_cast<unsigned>(p)));
  if (j < 1 || j > block) throw Error(ErrorCode::OutOfRange, "idx: j outside 1..d^p");
  Index value = 0;
  for (int digit : a) {
    if (digit < 0 || digit >= d) throw Error(ErrorCode::OutOfRange, "idx: digit outside 0..d-1");
    value = value * d + digit;
  }
  return j + block * value;
}

Disentangler build_rank_capped(const ComplexMatrix& sigma_hat, int d, Index D_squared, int p,
                               std::uint64_t seed) {
  const int y = block_qudits(sigma_hat, d);
  if (D_squared < 1) throw Error(ErrorCode::BadParameter, "rank cap must be positive");
  if (D_squared > sigma_hat.rows()) {
    throw Error(ErrorCode::RankCapExceedsDim,
                "rank cap " + std::to_string(D_squared) + " exceeds block dimension " + std::to_string(sigma_hat.rows()));
  }
  if (p < 0 || p > y) throw Error(ErrorCode::BadParameter, "kept qudit count must lie in 0..y");
  if (static_cast<Index>(ipow(static_cast<std::uint64_t>(d), static_cast<unsigned>(p))) < D_squared) {
    throw Error(ErrorCode::BadParameter, "d^p is smaller than the rank cap");
  }
  const auto eig = hermitian_eig(sigma_hat);
  return assemble(eig, D_squared, d, y, p, seed);
}

Disentangler build_threshold(const ComplexMatrix& sigma_hat, int d, double eta, std::uint64_t seed) {
  const int y = block_qudits(sigma_hat, d);
  if (!(eta > 0.0)) throw Error(ErrorCode::BadParameter, "threshold must be positive");
  const auto eig = hermitian_eig(sigma_hat);
  if (sigma_hat.trace().real() > 1.0 + 1e-9) throw Error(ErrorCode::BadParameter, "estimate trace exceeds one");
  Index m = 0;
  while (m < eig.values.size() && eig.values[m] > eta + kThresholdFloor) ++m;
  return assemble(eig, m, d, y, digits_for(m, d), seed);
}

ComplexMatrix selected_projector(const Disentangler& u) { return u.selected * u.selected.adjoint(); }

ComplexMatrix kept_projector(const Disentangler& u, int q) {
  const Index keep = static_cast<Index>(ipow(static_cast<std::uint64_t>(u.d), static_cast<unsigned>(q)));
  const ComplexMatrix rows = u.unitary.topRows(std::min(keep, u.unitary.rows()));
  return rows.adjoint() * rows;
}

}  // namespace mpslearn
