#include "mpslearn/config.hpp"
#include "mpslearn/errors.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mpslearn;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ErrorCode failure(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::OutOfRange;
}

}  // namespace

TEST(Config, ParsesEveryKind) {
  const auto c = parse(
      "# instance\n"
      "n = 12\n"
      "D = 3   # bond\n"
      "boundary = periodic\n"
      "kind = ghz\n"
      "variant = closest\n"
      "epsilon = 0.25\n"
      "mode = sample\n"
      "copies = 5000\n"
      "audit = true\n"
      "p = 3\n"
      "theta = 0.9\n"
      "\n"
      "out = results\n");
  EXPECT_EQ(c.state.n, 12);
  EXPECT_EQ(c.state.D, 3);
  EXPECT_EQ(c.learn.D, 3);
  EXPECT_EQ(c.state.boundary, Boundary::Periodic);
  EXPECT_EQ(c.state.kind, StateKind::Ghz);
  EXPECT_EQ(c.learn.variant, Variant::Closest);
  EXPECT_DOUBLE_EQ(c.learn.epsilon, 0.25);
  EXPECT_EQ(c.oracle.kind, OracleKind::FiniteSample);
  EXPECT_EQ(c.oracle.copies, 5000u);
  EXPECT_TRUE(c.learn.audit);
  EXPECT_EQ(c.learn.p_override, 3);
  EXPECT_EQ(c.learn.theta, 0.9);
  EXPECT_EQ(c.out, "results");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(failure("colour = blue\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("n = twelve\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("n = 12x\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("audit = maybe\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("mode = psychic\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("just some words\n"), ErrorCode::ParseError);
  EXPECT_EQ(failure("n =\n"), ErrorCode::ParseError);
}

TEST(Config, CanonicalTextIgnoresLayout) {
  const auto a = parse("n = 9\nepsilon = 0.1\n");
  const auto b = parse("# same run\nepsilon=0.1\n\nn=9\nout = elsewhere\n");
  EXPECT_EQ(canonical_text(a), canonical_text(b));
  EXPECT_NE(fnv1a(canonical_text(a)), fnv1a(canonical_text(parse("n = 10\n"))));
}

TEST(Config, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}
