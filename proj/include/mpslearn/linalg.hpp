#pragma once

// Dense complex linear algebra on small Hilbert spaces.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mpslearn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

struct ToleranceConfig {
  double hermitian_tol = 1e-9;
  double norm_tol = 1e-9;
  double rank_tol = 1e-10;
  double psd_tol = 1e-9;
};

/// Eigenpairs of a Hermitian matrix. `values` is sorted descending and
/// column k of `vectors` is the unit eigenvector for values[k], phase
/// normalized (see normalize_phase).
struct EigenDecomposition {
  RealVector values;
  ComplexMatrix vectors;
};

EigenDecomposition hermitian_eig(const ComplexMatrix& a, const ToleranceConfig& tol = {});

double trace_norm(const ComplexMatrix& a);
double operator_norm(const ComplexMatrix& a);

/// Tr over every site not in `keep`. Sites are 0-based and the first site is
/// the most significant digit of the row/column index. The result is ordered
/// by ascending site index.
ComplexMatrix partial_trace(const ComplexMatrix& a, std::span<const int> dims,
                            std::span<const int> keep);

/// op ⊗ I with `op` placed on the contiguous, ascending `support`.
ComplexMatrix embed_operator(const ComplexMatrix& op, std::span<const int> dims,
                             std::span<const int> support);

/// Completes the orthonormal columns of `partial` to a basis of C^dim. The
/// first columns of the result are the inputs unchanged; candidates come
/// from the canonical basis in index order, then from seeded random vectors.
ComplexMatrix gram_schmidt_extend(const ComplexMatrix& partial, Index dim, std::uint64_t seed);

/// Number of eigenvalues strictly above `tol`.
int numerical_rank(const ComplexMatrix& a, double tol, const ToleranceConfig& cfg = {});

/// Rotates the global phase so the largest-magnitude entry is positive real.
void normalize_phase(ComplexVector& v);

bool is_hermitian(const ComplexMatrix& a, double tol);
double max_abs(const ComplexMatrix& a);
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
ComplexMatrix random_unitary(Index dim, Rng& rng);
ComplexVector random_unit_vector(Index dim, Rng& rng);
/// Random density matrix of the given rank with unit trace.
ComplexMatrix random_density_matrix(Index dim, Index rank, Rng& rng);
ComplexMatrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// Rng seeded from a base seed and a tuple of stream labels.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

std::uint64_t ipow(std::uint64_t base, unsigned exp);

// ---------------------------------------------------------------------------
// Register tensor helpers. A register of k axes with local dimension d is
// stored as a flat vector of length d^k; axis 0 is the most significant digit.

/// Flat offsets of every digit assignment of `axes` (first listed axis most
/// significant), all other axes held at zero.
std::vector<Index> axis_offsets(std::span<const int> dims, std::span<const int> axes);
std::vector<Index> axis_offsets(int d, int num_axes, std::span<const int> axes);

std::vector<int> complement_axes(int num_axes, std::span<const int> axes);

/// Applies `op` to the listed axes of a register vector in place.
void apply_local(ComplexVector& state, int d, int num_axes, std::span<const int> axes,
                 const ComplexMatrix& op);

/// Keeps the component with every listed axis equal to |0>, and drops those
/// axes. The remaining axes keep their relative order.
ComplexVector project_zero_remove(const ComplexVector& state, int d, int num_axes,
                                  std::span<const int> axes);

/// Inverse of project_zero_remove: embeds `reduced` into a register of
/// `num_axes` axes with the listed axes set to |0>.
ComplexVector insert_zero_axes(const ComplexVector& reduced, int d, int num_axes,
                               std::span<const int> axes);

/// Reduced density matrix Tr_rest |v><v| for the listed axes.
ComplexMatrix reduced_from_vector(const ComplexVector& state, int d, int num_axes,
                                  std::span<const int> axes);

/// Schmidt coefficients (singular values) across the (axes | rest) bipartition.
RealVector schmidt_values(const ComplexVector& state, int d, int num_axes,
                          std::span<const int> axes);

}  // namespace mpslearn
