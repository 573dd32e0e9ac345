#pragma once

#include "mpslearn/learner.hpp"
#include "mpslearn/mps.hpp"
#include "mpslearn/tomography.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>

namespace mpslearn {

/// Parameters of a learning run. Read from a flat "key = value" file; '#'
/// starts a comment.
struct RunConfig {
  StateSpec state{8, 2, 2, Boundary::Open, 1, StateKind::Random};
  /// Optional MPS file that replaces the generated instance.
  std::string input;
  /// Weight of the maximally mixed state blended into the input.
  double mixture = 0.0;
  LearnParams learn;
  OracleMode oracle;
  std::string out = ".";
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical "key = value" listing of every field, in a fixed order.
std::string canonical_text(const RunConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

}  // namespace mpslearn
