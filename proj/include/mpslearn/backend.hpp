#pragma once

#include "mpslearn/linalg.hpp"

#include <span>
#include <vector>

namespace mpslearn {

inline constexpr Index kMaxPureDim = Index{1} << 16;
inline constexpr Index kMaxMixedDim = Index{1} << 10;

/// The (possibly sub-normalized) state of the qudits that are still in play.
/// Sites are addressed by their original labels; the register keeps them in
/// ascending order. Pure states are held as vectors, mixed states as density
/// matrices.
class QuantumStateBackend {
 public:
  static QuantumStateBackend pure(ComplexVector state, int d, int n);
  static QuantumStateBackend mixed(const ComplexMatrix& rho, int d, int n);

  bool is_pure() const { return pure_; }
  int d() const { return d_; }
  int num_sites() const { return static_cast<int>(labels_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  Index dim() const;

  double trace() const;
  /// Reduced state on the listed labels, which must be consecutive in the
  /// register.
  ComplexMatrix block_state(std::span<const int> labels) const;
  /// Applies a unitary to the listed labels (first label most significant).
  void apply(std::span<const int> labels, const ComplexMatrix& u);
  /// Projects the listed labels onto |0> and removes them from the register.
  void project_out(std::span<const int> labels);

  ComplexMatrix density() const;
  /// The state vector; only valid for pure backends.
  const ComplexVector& vector() const;
  /// Columns F with F F^dag equal to the density matrix.
  ComplexMatrix factor() const;
  /// <phi| state |phi> for a vector on the current register.
  double expectation(const ComplexVector& phi) const;

 private:
  std::vector<int> positions(std::span<const int> labels) const;

  bool pure_ = true;
  int d_ = 2;
  std::vector<int> labels_;
  // Pure: amplitudes. Mixed: column-major density matrix, viewed as a
  // register of 2k axes (column digits first, then row digits).
  ComplexVector data_;
};

}  // namespace mpslearn
