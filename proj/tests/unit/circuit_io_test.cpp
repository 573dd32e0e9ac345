#include "mpslearn/circuit_io.hpp"
#include "mpslearn/errors.hpp"

#include <gtest/gtest.h>

#include <optional>
#include <sstream>

using namespace mpslearn;

namespace {

LearnResult sample_run(int n, bool trivial = false) {
  StateSpec spec;
  spec.n = n;
  spec.D = 2;
  spec.seed = 4;
  LearnParams params;
  params.D = 2;
  params.epsilon = 0.2;
  params.seed = 9;
  params.theta = 0.75;
  OracleMode mode;
  mode.kind = OracleKind::BoundedNoise;
  mode.seed = 2;
  auto result = learn(QuantumStateBackend::pure(expand(random_mps(spec)), 2, n), params, mode);
  EXPECT_EQ(result.circuit.trivial, trivial);
  return result;
}

std::string serialize(const CircuitDescription& c) {
  std::ostringstream out;
  write_circuit(out, c);
  return out.str();
}

std::optional<ErrorCode> read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    (void)read_circuit(in);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(CircuitIo, RoundTripIsExact) {
  const auto result = sample_run(10);
  const std::string text = serialize(result.circuit);
  std::istringstream in(text);
  const auto back = read_circuit(in);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(reconstruct_state(back), reconstruct_state(result.circuit));
  EXPECT_EQ(back.meta.theta, 0.75);
  EXPECT_EQ(back.meta.deviations, result.circuit.meta.deviations);
}

TEST(CircuitIo, TrivialCircuitRoundTrips) {
  const auto result = sample_run(4, true);
  std::istringstream in(serialize(result.circuit));
  const auto back = read_circuit(in);
  EXPECT_TRUE(back.trivial);
  EXPECT_EQ(reconstruct_state(back), reconstruct_state(result.circuit));
}

TEST(CircuitIo, SupportMismatchIsMalformed) {
  std::string text = serialize(sample_run(8).circuit);
  const auto pos = text.find("support 4 0 1 2 3");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 17, "support 4 0 1 2 4");
  EXPECT_EQ(read_error(text), ErrorCode::MalformedCircuit);
}

TEST(CircuitIo, BadHeaderIsParseError) {
  EXPECT_EQ(read_error("mpslearn-circuit 2\n"), ErrorCode::ParseError);
  EXPECT_EQ(read_error("something else"), ErrorCode::ParseError);
  std::string text = serialize(sample_run(8).circuit);
  EXPECT_EQ(read_error(text.substr(0, text.size() / 2)), ErrorCode::ParseError);
}
