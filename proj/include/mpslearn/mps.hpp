#pragma once

#include "mpslearn/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mpslearn {

enum class Boundary { Open, Periodic };
enum class StateKind { Random, Ghz, Product, WState };

std::string_view to_string(Boundary b);
std::string_view to_string(StateKind k);
Boundary parse_boundary(std::string_view s);
StateKind parse_state_kind(std::string_view s);

struct StateSpec {
  int n = 2;
  int d = 2;
  int D = 1;
  Boundary boundary = Boundary::Open;
  std::uint64_t seed = 0;
  StateKind kind = StateKind::Random;
};

/// Amplitudes are c(i_1..i_n) = Tr[A1_{i_1} ... An_{i_n}]; tensors[k][i] is the
/// bond(k) x bond(k+1) matrix for site k and physical index i. Open chains
/// have bond(0) = bond(n) = 1.
struct MatrixProductState {
  int n = 0;
  int d = 2;
  Boundary boundary = Boundary::Open;
  std::vector<std::vector<ComplexMatrix>> tensors;

  Index bond(int k) const;
  Index max_bond() const;
};

/// Largest amplitude count expand() will materialize.
inline constexpr Index kMaxAmplitudes = Index{1} << 16;

MatrixProductState random_mps(const StateSpec& spec);

/// Checks bond shapes; throws InvalidSpec on inconsistency.
void validate(const MatrixProductState& mps);

ComplexVector expand(const MatrixProductState& mps);

/// Squared norm of the state, via transfer matrices (no expansion).
double norm_squared(const MatrixProductState& mps);

/// Rank of the reduced density matrix of sites [0, cut) at tolerance `tol`.
int schmidt_rank(const MatrixProductState& mps, int cut, double tol);
int schmidt_rank(const ComplexVector& state, int d, int n, int cut, double tol);

/// Reduced state of a contiguous block of sites (0-based, ascending).
ComplexMatrix block_rdm(const ComplexVector& state, int d, int n, std::span<const int> block);
ComplexMatrix block_rdm(const ComplexMatrix& rho, int d, int n, std::span<const int> block);

/// Stored complex entries for bond cap D: open chains clamp bond k to
/// min(D, d^k, d^(n-k)), periodic chains use D everywhere.
std::uint64_t mps_parameter_count(int n, int d, int D, Boundary boundary);

void write_mps(std::ostream& out, const MatrixProductState& mps);
MatrixProductState read_mps(std::istream& in);
void save_mps(const std::string& path, const MatrixProductState& mps);
MatrixProductState load_mps(const std::string& path);

}  // namespace mpslearn
