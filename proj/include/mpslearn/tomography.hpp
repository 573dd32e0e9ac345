#pragma once

#include "mpslearn/linalg.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace mpslearn {

enum class OracleKind { Exact, BoundedNoise, FiniteSample };

std::string_view to_string(OracleKind k);
OracleKind parse_oracle_kind(std::string_view s);

struct OracleMode {
  OracleKind kind = OracleKind::Exact;
  /// Trace-norm error for BoundedNoise. When unset, the learner substitutes
  /// the accuracy its algorithm requests.
  std::optional<double> eta;
  /// Copies per block for FiniteSample.
  std::uint64_t copies = 0;
  std::uint64_t seed = 0;
  /// BoundedNoise only: pull the estimate back into the PSD cone.
  bool project_psd = false;
};

struct TomographyOutcome {
  ComplexMatrix estimate;
  double success_mass = 0.0;
  std::uint64_t copies_used = 0;
  OracleMode mode;
};

/// Estimate of a block's sub-normalized reduced state. `stream` separates the
/// randomness of different calls that share a seed.
TomographyOutcome estimate_reduced(const ComplexMatrix& sigma, int d, const OracleMode& mode,
                                   std::uint64_t stream);

/// Same, starting from a (sub-normalized) register vector or density matrix
/// of `num_sites` qudits. Block sites are register positions.
TomographyOutcome estimate_block(const ComplexVector& state, int d, int num_sites,
                                 std::span<const int> block, const OracleMode& mode,
                                 std::uint64_t stream);
TomographyOutcome estimate_block(const ComplexMatrix& rho, int d, int num_sites,
                                 std::span<const int> block, const OracleMode& mode,
                                 std::uint64_t stream);

/// ceil(C mu D^2 d^r log(1/delta) / eta^2), r = r_minus_i.
std::uint64_t budget_rank_constrained(double mu, int D, int d, int r_minus_i, double eta, double delta,
                                      double constant = 1.0);
/// ceil(C mu d^(2r) log(1/delta) / eta^2).
std::uint64_t budget_general(double mu, int d, int r_minus_i, double eta, double delta,
                             double constant = 1.0);

/// Number of successes out of m post-selection attempts with probability mu.
std::uint64_t simulate_postselect(std::uint64_t m, double mu, std::uint64_t seed);

/// Per-qudit measurement bases used by finite-sample tomography. Column o of
/// basis b is the outcome-o vector. Mutually unbiased for prime d.
std::vector<ComplexMatrix> measurement_bases(int d, std::uint64_t seed);

/// Dual frame of the single-qudit measurement: duals[b * d + o] reconstructs
/// X = sum Tr(P_bo X) duals[b * d + o].
std::vector<ComplexMatrix> dual_frame(const std::vector<ComplexMatrix>& bases);

}  // namespace mpslearn
