#include "mpslearn/backend.hpp"

#include "mpslearn/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mpslearn {

namespace {

Index register_dim(int d, int n, Index limit, const char* what) {
  Index dim = 1;
  for (int k = 0; k < n; ++k) {
    dim *= d;
    if (dim > limit) {
      throw Error(ErrorCode::BackendTooLarge,
                  std::string(what) + " register of " + std::to_string(n) + " qudits exceeds dimension " +
                      std::to_string(limit));
    }
  }
  return dim;
}

}  // namespace

QuantumStateBackend QuantumStateBackend::pure(ComplexVector state, int d, int n) {
  const Index dim = register_dim(d, n, kMaxPureDim, "pure");
  if (state.size() != dim) throw Error(ErrorCode::DimensionMismatch, "state vector does not match d^n");
  QuantumStateBackend b;
  b.pure_ = true;
  b.d_ = d;
  b.labels_.resize(static_cast<std::size_t>(n));
  std::iota(b.labels_.begin(), b.labels_.end(), 0);
  b.data_ = std::move(state);
  return b;
}

QuantumStateBackend QuantumStateBackend::mixed(const ComplexMatrix& rho, int d, int n) {
  const Index dim = register_dim(d, n, kMaxMixedDim, "mixed");
  if (rho.rows() != dim || rho.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "density matrix does not match d^n");
  if (!is_hermitian(rho, 1e-9)) throw Error(ErrorCode::NonHermitian, "density matrix is not Hermitian");
  QuantumStateBackend b;
  b.pure_ = false;
  b.d_ = d;
  b.labels_.resize(static_cast<std::size_t>(n));
  std::iota(b.labels_.begin(), b.labels_.end(), 0);
  b.data_ = hermitian_part(rho).reshaped();
  return b;
}

Index QuantumStateBackend::dim() const {
  return static_cast<Index>(ipow(static_cast<std::uint64_t>(d_), static_cast<unsigned>(labels_.size())));
}

std::vector<int> QuantumStateBackend::positions(std::span<const int> labels) const {
  std::vector<int> out;
  for (int label : labels) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) {
      throw Error(ErrorCode::BlockOutOfRange, "site " + std::to_string(label) + " is not in the register");
    }
    out.push_back(static_cast<int>(it - labels_.begin()));
  }
  return out;
}

double QuantumStateBackend::trace() const {
  if (pure_) return data_.squaredNorm();
  return density().trace().real();
}

ComplexMatrix QuantumStateBackend::density() const {
  if (pure_) return data_ * data_.adjoint();
  const Index n = dim();
  return data_.reshaped(n, n);
}

const ComplexVector& QuantumStateBackend::vector() const {
  if (!pure_) throw Error(ErrorCode::BadParameter, "mixed backend has no state vector");
  return data_;
}

ComplexMatrix QuantumStateBackend::factor() const {
  if (pure_) return data_;
  auto eig = hermitian_eig(density());
  const double cut = eig.values.size() > 0 ? 1e-14 * std::max(eig.values[0], 0.0) : 0.0;
  Index keep = 0;
  while (keep < eig.values.size() && eig.values[keep] > cut) ++keep;
  return eig.vectors.leftCols(keep) * eig.values.head(keep).cwiseSqrt().asDiagonal();
}

double QuantumStateBackend::expectation(const ComplexVector& phi) const {
  if (phi.size() != dim()) throw Error(ErrorCode::DimensionMismatch, "vector does not match the register");
  if (pure_) return std::norm(phi.dot(data_));
  return phi.dot(density() * phi).real();
}

ComplexMatrix QuantumStateBackend::block_state(std::span<const int> labels) const {
  const auto pos = positions(labels);
  const int k = num_sites();
  if (pure_) return reduced_from_vector(data_, d_, k, pos);
  std::vector<int> dims(static_cast<std::size_t>(k), d_);
  return hermitian_part(partial_trace(density(), dims, pos));
}

void QuantumStateBackend::apply(std::span<const int> labels, const ComplexMatrix& u) {
  const auto pos = positions(labels);
  const int k = num_sites();
  if (pure_) {
    apply_local(data_, d_, k, pos, u);
    return;
  }
  std::vector<int> cols = pos;
  std::vector<int> rows;
  for (int p : pos) rows.push_back(p + k);
  apply_local(data_, d_, 2 * k, rows, u);
  apply_local(data_, d_, 2 * k, cols, u.conjugate());
}

void QuantumStateBackend::project_out(std::span<const int> labels) {
  if (labels.empty()) return;
  const auto pos = positions(labels);
  const int k = num_sites();
  if (pure_) {
    data_ = project_zero_remove(data_, d_, k, pos);
  } else {
    std::vector<int> axes = pos;
    for (int p : pos) axes.push_back(p + k);
    data_ = project_zero_remove(data_, d_, 2 * k, axes);
  }
  std::vector<int> kept;
  for (int label : labels_) {
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) kept.push_back(label);
  }
  labels_ = std::move(kept);
}

}  // namespace mpslearn
