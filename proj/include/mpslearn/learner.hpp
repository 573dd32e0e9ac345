#pragma once

#include "mpslearn/backend.hpp"
#include "mpslearn/linalg.hpp"
#include "mpslearn/mps.hpp"
#include "mpslearn/plan.hpp"
#include "mpslearn/tomography.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpslearn {

enum class Variant { Exact, Closest };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

struct LearnParams {
  int D = 2;
  double epsilon = 0.1;
  double delta = 0.1;
  Variant variant = Variant::Exact;
  /// Forces the block half-size instead of deriving it from D and epsilon.
  std::optional<int> p_override;
  /// Fidelity promise; recorded only.
  std::optional<double> theta;
  /// Keep a snapshot of every intermediate register for auditing.
  bool audit = false;
  /// Seed for basis completion inside the disentanglers.
  std::uint64_t seed = 0;
  /// Multiplier on every copy budget.
  double constant = 1.0;
};

struct CircuitMetadata {
  Variant variant = Variant::Exact;
  OracleMode oracle;
  std::uint64_t seed = 0;
  int D = 1;
  double epsilon = 0.0;
  /// Accuracy actually targeted (epsilon' for the closest variant).
  double epsilon_used = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  std::optional<double> theta;
  std::vector<std::string> deviations;
};

/// Everything needed to rebuild the learned state. When `trivial` is set the
/// tree is skipped and `residual` covers the whole register.
struct CircuitDescription {
  int n = 0;
  int d = 2;
  int p = 1;
  bool trivial = false;
  LayerPlan plan;
  /// unitaries[j - 1][i - 1] acts on plan.layers[j - 1][i - 1].support; empty
  /// for blocks that are passed through.
  std::vector<std::vector<ComplexMatrix>> unitaries;
  ComplexVector residual;
  std::vector<int> residual_sites;
  CircuitMetadata meta;

  int depth() const { return trivial ? 0 : plan.M; }
};

struct BlockRecord {
  int i = 0;
  std::vector<int> support;
  int projected = 0;
  double success_mass = 0.0;
  /// ||sigma_hat - sigma||_1 of the block estimate.
  double trace_distance = 0.0;
  /// Tr[(I - Pi) sigma] for the exact variant, ||(I - Pi) sigma (I - Pi)||_inf
  /// for the closest variant, with Pi the kept subspace of the block.
  double leakage = 0.0;
  int selected = 0;
  std::uint64_t copies = 0;
};

struct LayerRecord {
  int j = 0;
  /// Trace of the register after layer j.
  double success_mass = 0.0;
  double fidelity_drop_bound = 0.0;
  std::vector<BlockRecord> blocks;
};

struct LearnReport {
  double final_fidelity = 0.0;
  std::uint64_t copies_used = 0;
  std::uint64_t final_copies = 0;
  double final_success_mass = 0.0;
  double final_trace_distance = 0.0;
  std::vector<LayerRecord> per_layer;
  std::vector<std::string> deviations;
};

/// Register snapshots (rho^j)' for j = 0..M.
struct AuditTrail {
  std::vector<QuantumStateBackend> snapshots;
};

struct LearnResult {
  CircuitDescription circuit;
  LearnReport report;
  std::optional<AuditTrail> audit;
};

LearnResult learn(const QuantumStateBackend& input, const LearnParams& params, const OracleMode& mode);

/// Checks shapes and supports against the plan; throws MalformedCircuit.
void validate(const CircuitDescription& circuit);

/// (U^1)^dag ... (U^M)^dag (|0...0> (x) psi_hat) on all n sites.
ComplexVector reconstruct_state(const CircuitDescription& circuit);

/// Applies layers 1..j and keeps the all-zeros component of each projection.
/// The result lives on the sites remaining after layer j (ascending labels).
ComplexVector residual_projection(const ComplexVector& phi, const CircuitDescription& circuit, int j);

/// Sites still in the register after layer j.
std::vector<int> remaining_sites(const CircuitDescription& circuit, int j);

/// rho = F F^dag on the full register.
struct FactoredDensity {
  ComplexMatrix factor;
  double expectation(const ComplexVector& phi) const { return (factor.adjoint() * phi).squaredNorm(); }
  double trace() const { return factor.squaredNorm(); }
  ComplexMatrix dense() const { return factor * factor.adjoint(); }
};

/// rho^j = (E^j)^dag [|0><0| (x) (rho^j)'] E^j, rebuilt from the audit trail.
FactoredDensity stepwise_state(const CircuitDescription& circuit, const std::optional<AuditTrail>& audit, int j);

/// Smallest eigenvalue of A A^dag - B B^dag.
double min_eigenvalue_difference(const ComplexMatrix& a, const ComplexMatrix& b);

/// Per-layer fidelity-loss bound: 2 sqrt(2 eta 2^(M-j)), times D for the
/// closest variant.
double fidelity_drop_bound(Variant variant, double eta, int D, int M, int j);

/// Contracts the circuit into an MPS by applying each block inverse to a
/// tensor train and re-splitting with SVDs that drop only numerically zero
/// singular values.
MatrixProductState extract_mps(const CircuitDescription& circuit);

/// Bond bound d^(M+1) D^(2(M+1)) for circuits learned by the exact variant.
double extraction_bond_bound(const CircuitDescription& circuit);

}  // namespace mpslearn
