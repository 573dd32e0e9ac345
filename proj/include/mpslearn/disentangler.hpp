#pragma once

#include "mpslearn/linalg.hpp"

#include <cstdint>
#include <span>

namespace mpslearn {

/// A block unitary U that sends the i-th basis vector phi_i (selected
/// eigenvectors first, then their completion) to computational basis state i.
/// Leading qudits are the most significant digits, so the selected vectors
/// land in |0...0> on the first y - kept_qudits qudits.
struct Disentangler {
  ComplexMatrix unitary;
  int d = 2;
  int y = 0;
  int kept_qudits = 0;
  Index kept_dim = 1;
  /// Orthonormal columns spanning the selected eigenspace W.
  ComplexMatrix selected;
  /// Spectrum of the estimate the unitary was built from, descending.
  RealVector spectrum;
};

/// 1-based position of (a, j) in the completed basis: j + d^p * value(a),
/// where a holds y - p base-d digits, most significant first.
Index idx(std::span<const int> a, Index j, int d, int y, int p);

/// Keeps the top D_squared eigenvectors of sigma_hat and rotates them into
/// the last p qudits. Requires d^p >= D_squared and y >= p.
Disentangler build_rank_capped(const ComplexMatrix& sigma_hat, int d, Index D_squared, int p,
                               std::uint64_t seed);

/// Keeps every eigenvector whose eigenvalue exceeds eta (by more than 1e-12)
/// and rotates them into the last t = ceil(log_d m) qudits.
Disentangler build_threshold(const ComplexMatrix& sigma_hat, int d, double eta, std::uint64_t seed);

/// Projector onto the selected eigenspace W.
ComplexMatrix selected_projector(const Disentangler& u);

/// U^dag (|0><0|^{y-q} (x) I_q) U: the block subspace that survives projecting
/// the first y - q qudits onto zero after U.
ComplexMatrix kept_projector(const Disentangler& u, int q);

/// Number of base-d digits needed to label m items (0 when m <= 1).
int digits_for(Index m, int d);

}  // namespace mpslearn
