#include "mpslearn/linalg.hpp"

#include "mpslearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpslearn {

namespace {

constexpr double kTieTol = 1e-12;

bool lex_less(const ComplexVector& a, const ComplexVector& b) {
  for (Index k = 0; k < a.size(); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return false;
}

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::NonSquare, std::string(what) + ": matrix is " +
                                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (auto s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

void normalize_phase(ComplexVector& v) {
  if (v.size() == 0) return;
  double best = 0.0;
  for (Index k = 0; k < v.size(); ++k) best = std::max(best, std::abs(v[k]));
  if (best == 0.0) return;
  // First entry within a relative hair of the maximum, so near-ties resolve
  // by index rather than by rounding noise.
  Index pivot = 0;
  for (Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= best * (1.0 - 1e-9)) {
      pivot = k;
      break;
    }
  }
  const Complex phase = std::conj(v[pivot]) / std::abs(v[pivot]);
  v *= phase;
  v[pivot] = Complex(v[pivot].real(), 0.0);
}

EigenDecomposition hermitian_eig(const ComplexMatrix& a, const ToleranceConfig& tol) {
  require_square(a, "hermitian_eig");
  if (!is_hermitian(a, tol.hermitian_tol)) {
    throw Error(ErrorCode::NonHermitian,
                "hermitian_eig: ||A - A^H||_max = " + std::to_string(max_abs(a - a.adjoint())));
  }
  const Index n = a.rows();
  EigenDecomposition out;
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "hermitian_eig: solver did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const RealVector& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return vals[x] > vals[y]; });

  std::vector<ComplexVector> vecs;
  vecs.reserve(order.size());
  for (Index k : order) {
    ComplexVector v = solver.eigenvectors().col(k);
    normalize_phase(v);
    vecs.push_back(std::move(v));
  }

  // Degenerate clusters are ordered lexicographically by their normalized
  // eigenvectors.
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           vals[order[end - 1]] - vals[order[end]] <= kTieTol * scale) {
      ++end;
    }
    if (end - start > 1) {
      std::vector<std::size_t> idx(end - start);
      std::iota(idx.begin(), idx.end(), start);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t x, std::size_t y) { return lex_less(vecs[x], vecs[y]); });
      std::vector<ComplexVector> sorted_vecs;
      std::vector<Index> sorted_order;
      for (auto i : idx) {
        sorted_vecs.push_back(vecs[i]);
        sorted_order.push_back(order[i]);
      }
      for (std::size_t i = 0; i < idx.size(); ++i) {
        vecs[start + i] = sorted_vecs[i];
        order[start + i] = sorted_order[i];
      }
    }
    start = end;
  }

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values[k] = vals[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = vecs[static_cast<std::size_t>(k)];
  }
  return out;
}

double trace_norm(const ComplexMatrix& a) {
  require_square(a, "trace_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

double operator_norm(const ComplexMatrix& a) {
  require_square(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues()[0];
}

std::vector<Index> axis_offsets(std::span<const int> dims, std::span<const int> axes) {
  const int num_axes = static_cast<int>(dims.size());
  std::vector<Index> stride(dims.size(), 1);
  for (int k = num_axes - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<Index> offsets{0};
  for (int axis : axes) {
    std::vector<Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[axis]));
    for (Index base : offsets) {
      for (int digit = 0; digit < dims[axis]; ++digit) next.push_back(base + digit * stride[axis]);
    }
    offsets.swap(next);
  }
  return offsets;
}

std::vector<Index> axis_offsets(int d, int num_axes, std::span<const int> axes) {
  std::vector<int> dims(static_cast<std::size_t>(num_axes), d);
  return axis_offsets(dims, axes);
}

std::vector<int> complement_axes(int num_axes, std::span<const int> axes) {
  std::vector<bool> used(static_cast<std::size_t>(num_axes), false);
  for (int a : axes) used[static_cast<std::size_t>(a)] = true;
  std::vector<int> rest;
  for (int k = 0; k < num_axes; ++k) {
    if (!used[static_cast<std::size_t>(k)]) rest.push_back(k);
  }
  return rest;
}

namespace {

std::vector<int> validated_axes(std::span<const int> axes, int num_axes, const char* what) {
  std::vector<int> sorted(axes.begin(), axes.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] < 0 || sorted[k] >= num_axes || (k > 0 && sorted[k] == sorted[k - 1])) {
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": bad site index list");
    }
  }
  return sorted;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const int> dims,
                            std::span<const int> keep) {
  require_square(a, "partial_trace");
  Index total = 1;
  for (int d : dims) total *= d;
  if (total != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "partial_trace: dims do not match operator size");
  }
  const auto kept = validated_axes(keep, static_cast<int>(dims.size()), "partial_trace");
  const auto rest = complement_axes(static_cast<int>(dims.size()), kept);
  const auto off_keep = axis_offsets(dims, kept);
  const auto off_rest = axis_offsets(dims, rest);
  const Index m = static_cast<Index>(off_keep.size());
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (Index base : off_rest) {
    for (Index c = 0; c < m; ++c) {
      for (Index r = 0; r < m; ++r) out(r, c) += a(base + off_keep[r], base + off_keep[c]);
    }
  }
  return out;
}

ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const int> dims,
                             std::span<const int> support) {
  require_square(op, "embed_operator");
  const int num_axes = static_cast<int>(dims.size());
  if (support.empty()) throw Error(ErrorCode::DimensionMismatch, "embed_operator: empty support");
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 0 || support[k] >= num_axes) {
      throw Error(ErrorCode::DimensionMismatch, "embed_operator: support out of range");
    }
    if (k > 0 && support[k] != support[k - 1] + 1) {
      throw Error(ErrorCode::NonContiguousSupport, "embed_operator: support must be contiguous");
    }
  }
  const auto off = axis_offsets(dims, support);
  if (static_cast<Index>(off.size()) != op.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "embed_operator: operator dimension mismatch");
  }
  const auto rest = complement_axes(num_axes, support);
  const auto base = axis_offsets(dims, rest);
  Index total = 1;
  for (int d : dims) total *= d;
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  for (Index b : base) {
    for (Index c = 0; c < op.cols(); ++c) {
      for (Index r = 0; r < op.rows(); ++r) out(b + off[r], b + off[c]) = op(r, c);
    }
  }
  return out;
}

ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

ComplexVector random_unit_vector(Index dim, Rng& rng) {
  ComplexVector v = gaussian_matrix(dim, 1, rng).col(0);
  return v / v.norm();
}

ComplexMatrix random_unitary(Index dim, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

ComplexMatrix random_density_matrix(Index dim, Index rank, Rng& rng) {
  const ComplexMatrix g = gaussian_matrix(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

ComplexMatrix gram_schmidt_extend(const ComplexMatrix& partial, Index dim, std::uint64_t seed) {
  const Index k = partial.cols();
  if (k > dim || (k > 0 && partial.rows() != dim)) {
    throw Error(ErrorCode::DimensionMismatch, "gram_schmidt_extend: partial basis does not fit");
  }
  if (k > 0) {
    const ComplexMatrix gram = partial.adjoint() * partial;
    if (max_abs(gram - ComplexMatrix::Identity(k, k)) > 1e-10) {
      throw Error(ErrorCode::NotOrthonormal, "gram_schmidt_extend: input vectors not orthonormal");
    }
  }
  ComplexMatrix basis(dim, dim);
  if (k > 0) basis.leftCols(k) = partial;
  Index filled = k;

  auto try_add = [&](ComplexVector v) {
    // Two passes of classical Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      if (filled > 0) {
        const ComplexVector coeffs = basis.leftCols(filled).adjoint() * v;
        v -= basis.leftCols(filled) * coeffs;
      }
    }
    const double norm = v.norm();
    if (norm < 1e-8) return;
    basis.col(filled++) = v / norm;
  };

  for (Index c = 0; c < dim && filled < dim; ++c) try_add(ComplexVector::Unit(dim, c));
  Rng rng = make_rng(seed, {0x6773ULL});
  int attempts = 0;
  while (filled < dim) {
    if (++attempts > 1000) {
      throw Error(ErrorCode::NoConvergence, "gram_schmidt_extend: could not complete basis");
    }
    try_add(random_unit_vector(dim, rng));
  }
  return basis;
}

int numerical_rank(const ComplexMatrix& a, double tol, const ToleranceConfig& cfg) {
  require_square(a, "numerical_rank");
  if (!is_hermitian(a, cfg.hermitian_tol)) {
    throw Error(ErrorCode::NonHermitian, "numerical_rank: input is not Hermitian");
  }
  if (a.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "numerical_rank: solver did not converge");
  }
  return static_cast<int>((solver.eigenvalues().array() > tol).count());
}

namespace {

ComplexMatrix gather(const ComplexVector& state, const std::vector<Index>& off,
                     const std::vector<Index>& base) {
  ComplexMatrix x(static_cast<Index>(off.size()), static_cast<Index>(base.size()));
  for (std::size_t r = 0; r < base.size(); ++r) {
    for (std::size_t b = 0; b < off.size(); ++b) {
      x(static_cast<Index>(b), static_cast<Index>(r)) = state[base[r] + off[b]];
    }
  }
  return x;
}

void check_register(const ComplexVector& state, int d, int num_axes, std::span<const int> axes,
                    const char* what) {
  const auto expected = static_cast<Index>(ipow(static_cast<std::uint64_t>(d),
                                                static_cast<unsigned>(num_axes)));
  if (state.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": register size mismatch");
  }
  std::vector<int> sorted(axes.begin(), axes.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] < 0 || sorted[k] >= num_axes || (k > 0 && sorted[k] == sorted[k - 1])) {
      throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": bad axis list");
    }
  }
}

}  // namespace

void apply_local(ComplexVector& state, int d, int num_axes, std::span<const int> axes,
                 const ComplexMatrix& op) {
  check_register(state, d, num_axes, axes, "apply_local");
  const auto off = axis_offsets(d, num_axes, axes);
  if (op.rows() != static_cast<Index>(off.size()) || op.cols() != op.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "apply_local: operator dimension mismatch");
  }
  const auto base = axis_offsets(d, num_axes, complement_axes(num_axes, axes));
  const ComplexMatrix y = op * gather(state, off, base);
  for (std::size_t r = 0; r < base.size(); ++r) {
    for (std::size_t b = 0; b < off.size(); ++b) {
      state[base[r] + off[b]] = y(static_cast<Index>(b), static_cast<Index>(r));
    }
  }
}

ComplexVector project_zero_remove(const ComplexVector& state, int d, int num_axes,
                                  std::span<const int> axes) {
  check_register(state, d, num_axes, axes, "project_zero_remove");
  const auto base = axis_offsets(d, num_axes, complement_axes(num_axes, axes));
  ComplexVector out(static_cast<Index>(base.size()));
  for (std::size_t r = 0; r < base.size(); ++r) out[static_cast<Index>(r)] = state[base[r]];
  return out;
}

ComplexVector insert_zero_axes(const ComplexVector& reduced, int d, int num_axes,
                               std::span<const int> axes) {
  const auto rest = complement_axes(num_axes, axes);
  const auto base = axis_offsets(d, num_axes, rest);
  if (reduced.size() != static_cast<Index>(base.size())) {
    throw Error(ErrorCode::DimensionMismatch, "insert_zero_axes: reduced size mismatch");
  }
  ComplexVector out = ComplexVector::Zero(static_cast<Index>(
      ipow(static_cast<std::uint64_t>(d), static_cast<unsigned>(num_axes))));
  for (std::size_t r = 0; r < base.size(); ++r) out[base[r]] = reduced[static_cast<Index>(r)];
  return out;
}

ComplexMatrix reduced_from_vector(const ComplexVector& state, int d, int num_axes,
                                  std::span<const int> axes) {
  check_register(state, d, num_axes, axes, "reduced_from_vector");
  const auto off = axis_offsets(d, num_axes, axes);
  const auto base = axis_offsets(d, num_axes, complement_axes(num_axes, axes));
  const ComplexMatrix x = gather(state, off, base);
  return hermitian_part(x * x.adjoint());
}

RealVector schmidt_values(const ComplexVector& state, int d, int num_axes,
                          std::span<const int> axes) {
  check_register(state, d, num_axes, axes, "schmidt_values");
  const auto off = axis_offsets(d, num_axes, axes);
  const auto base = axis_offsets(d, num_axes, complement_axes(num_axes, axes));
  Eigen::BDCSVD<ComplexMatrix> svd(gather(state, off, base));
  return svd.singularValues();
}

}  // namespace mpslearn
