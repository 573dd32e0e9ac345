#include "mpslearn/errors.hpp"
#include "mpslearn/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace mpslearn;

namespace {

ComplexMatrix random_hermitian(Index dim, Rng& rng) {
  return hermitian_part(gaussian_matrix(dim, dim, rng));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

ComplexMatrix pauli_z() {
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

}  // namespace

TEST(HermitianEig, IdentityHasUnitSpectrum) {
  auto eig = hermitian_eig(ComplexMatrix::Identity(4, 4));
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(eig.values[k], 1.0, 1e-14);
}

TEST(HermitianEig, DiagonalSortedDescending) {
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 0) = 3;
  a(1, 1) = 1;
  a(2, 2) = 2;
  auto eig = hermitian_eig(a);
  EXPECT_NEAR(eig.values[0], 3.0, 1e-14);
  EXPECT_NEAR(eig.values[1], 2.0, 1e-14);
  EXPECT_NEAR(eig.values[2], 1.0, 1e-14);
  EXPECT_NEAR(std::abs(eig.vectors(2, 1)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(eig.vectors(1, 2)), 1.0, 1e-14);
}

TEST(HermitianEig, ReconstructsRandomMatrices) {
  Rng rng = make_rng(11);
  for (Index dim : {8, 32, 256}) {
    ComplexMatrix a = random_hermitian(dim, rng);
    auto eig = hermitian_eig(a);
    ComplexMatrix back = ComplexMatrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) back += eig.values[k] * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    EXPECT_LE(max_abs(back - a), 1e-10 * static_cast<double>(dim));
    EXPECT_LE(max_abs(eig.vectors.adjoint() * eig.vectors - ComplexMatrix::Identity(dim, dim)), 1e-10);
    for (Index k = 1; k < dim; ++k) EXPECT_GE(eig.values[k - 1], eig.values[k]);
  }
}

TEST(HermitianEig, EigenvectorsCarryPhaseConvention) {
  Rng rng = make_rng(12);
  auto eig = hermitian_eig(random_hermitian(6, rng));
  for (Index k = 0; k < 6; ++k) {
    Index arg = 0;
    eig.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(eig.vectors(arg, k).real(), 0.0);
    EXPECT_EQ(eig.vectors(arg, k).imag(), 0.0);
  }
}

TEST(HermitianEig, DegenerateInputIsDeterministic) {
  Rng rng = make_rng(13);
  ComplexMatrix u = random_unitary(4, rng);
  RealVector d(4);
  d << 1, 1, 0.5, 0.5;
  ComplexMatrix a = u * d.asDiagonal() * u.adjoint();
  a = hermitian_part(a);
  auto first = hermitian_eig(a);
  auto second = hermitian_eig(a);
  EXPECT_EQ(max_abs(first.vectors - second.vectors), 0.0);
}

TEST(HermitianEig, RejectsNonHermitian) {
  ComplexMatrix a(2, 2);
  a << 0, 1, 0, 0;
  try {
    hermitian_eig(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonHermitian);
  }
}

TEST(TraceNorm, TrivialCases) {
  EXPECT_EQ(trace_norm(ComplexMatrix::Zero(3, 3)), 0.0);
  EXPECT_NEAR(trace_norm(pauli_z()), 2.0, 1e-14);
  EXPECT_THROW(trace_norm(ComplexMatrix::Zero(2, 3)), Error);
}

TEST(TraceNorm, MatchesEigenvalueSumForDensityDifferences) {
  Rng rng = make_rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix diff = random_density_matrix(8, 8, rng) - random_density_matrix(8, 3, rng);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(diff));
    EXPECT_NEAR(trace_norm(diff), es.eigenvalues().cwiseAbs().sum(), 1e-10);
  }
}

TEST(TraceNorm, TriangleInequality) {
  Rng rng = make_rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix a = gaussian_matrix(5, 5, rng);
    ComplexMatrix b = gaussian_matrix(5, 5, rng);
    EXPECT_LE(trace_norm(a + b), trace_norm(a) + trace_norm(b) + 1e-9);
  }
}

TEST(OperatorNorm, TrivialAndOracle) {
  EXPECT_NEAR(operator_norm(ComplexMatrix::Identity(3, 3)), 1.0, 1e-14);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = 0.1;
  EXPECT_NEAR(operator_norm(d), 0.3, 1e-14);
  Rng rng = make_rng(16);
  ComplexMatrix a = gaussian_matrix(7, 7, rng);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.adjoint() * a);
  EXPECT_NEAR(operator_norm(a), std::sqrt(es.eigenvalues().maxCoeff()), 1e-10);
}

TEST(PartialTrace, BellStateReducesToMaximallyMixed) {
  ComplexVector bell = ComplexVector::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  std::vector<int> dims{2, 2};
  std::vector<int> keep{0};
  ComplexMatrix r = partial_trace(bell * bell.adjoint(), dims, keep);
  EXPECT_LE(max_abs(r - 0.5 * ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(PartialTrace, ProductStateKeepsFactor) {
  Rng rng = make_rng(17);
  ComplexMatrix r1 = random_density_matrix(2, 2, rng);
  ComplexMatrix r2 = 0.7 * random_density_matrix(3, 2, rng);
  std::vector<int> dims{2, 3};
  std::vector<int> keep{0};
  EXPECT_LE(max_abs(partial_trace(kron(r1, r2), dims, keep) - r1 * r2.trace()), 1e-14);
  std::vector<int> keep2{1};
  EXPECT_LE(max_abs(partial_trace(kron(r1, r2), dims, keep2) - r2), 1e-14);
}

TEST(PartialTrace, MatchesIndexLoopOracle) {
  Rng rng = make_rng(18);
  ComplexMatrix rho = random_density_matrix(8, 8, rng);
  std::vector<int> dims{2, 2, 2};
  std::vector<int> keep{0, 2};
  ComplexMatrix got = partial_trace(rho, dims, keep);
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b2 = 0; b2 < 2; ++b2)
          for (int m = 0; m < 2; ++m)
            want(a0 * 2 + a2, b0 * 2 + b2) += rho(a0 * 4 + m * 2 + a2, b0 * 4 + m * 2 + b2);
  EXPECT_LE(max_abs(got - want), 1e-15);
  EXPECT_NEAR(std::abs(got.trace() - rho.trace()), 0.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(got));
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(PartialTrace, DimensionMismatchThrows) {
  std::vector<int> dims{2, 2};
  std::vector<int> keep{0};
  EXPECT_THROW(partial_trace(ComplexMatrix::Identity(3, 3), dims, keep), Error);
}

TEST(EmbedOperator, KroneckerOracle) {
  std::vector<int> two{2, 2};
  std::vector<int> site0{0};
  EXPECT_LE(max_abs(embed_operator(pauli_x(), two, site0) -
                    kron(pauli_x(), ComplexMatrix::Identity(2, 2))),
            0.0);
  std::vector<int> three{2, 2, 2};
  std::vector<int> site1{1};
  ComplexMatrix want = kron(kron(ComplexMatrix::Identity(2, 2), pauli_z()), ComplexMatrix::Identity(2, 2));
  EXPECT_LE(max_abs(embed_operator(pauli_z(), three, site1) - want), 0.0);
  std::vector<int> pair{1, 2};
  EXPECT_LE(max_abs(embed_operator(ComplexMatrix::Identity(4, 4), three, pair) -
                    ComplexMatrix::Identity(8, 8)),
            0.0);
}

TEST(EmbedOperator, Errors) {
  std::vector<int> three{2, 2, 2};
  std::vector<int> gap{0, 2};
  try {
    embed_operator(ComplexMatrix::Identity(4, 4), three, gap);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonContiguousSupport);
  }
  std::vector<int> one{0};
  try {
    embed_operator(ComplexMatrix::Identity(4, 4), three, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(GramSchmidt, CompletesFromCanonical) {
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 1);
  e0(0, 0) = 1;
  ComplexMatrix basis = gram_schmidt_extend(e0, 2, 1);
  EXPECT_NEAR(std::abs(basis(1, 1)), 1.0, 1e-15);
  ComplexMatrix full = ComplexMatrix::Identity(3, 3);
  EXPECT_EQ(max_abs(gram_schmidt_extend(full, 3, 1) - full), 0.0);
}

TEST(GramSchmidt, GramMatrixIsIdentity) {
  ComplexMatrix plus = ComplexMatrix::Zero(4, 1);
  plus(0, 0) = plus(1, 0) = 1.0 / std::sqrt(2.0);
  ComplexMatrix basis = gram_schmidt_extend(plus, 4, 3);
  EXPECT_LE(max_abs(basis.adjoint() * basis - ComplexMatrix::Identity(4, 4)), 1e-10);
  EXPECT_EQ(max_abs(basis.col(0) - plus.col(0)), 0.0);
}

TEST(GramSchmidt, RandomPartialsOverManySeeds) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = make_rng(seed, {19});
    ComplexMatrix u = random_unitary(16, rng);
    const Index k = static_cast<Index>(seed % 16);
    ComplexMatrix basis = gram_schmidt_extend(u.leftCols(k), 16, seed);
    ASSERT_LE(max_abs(basis.adjoint() * basis - ComplexMatrix::Identity(16, 16)), 1e-10);
    ASSERT_EQ(max_abs(basis.leftCols(k) - u.leftCols(k)), 0.0);
    ASSERT_EQ(max_abs(basis - gram_schmidt_extend(u.leftCols(k), 16, seed)), 0.0);
  }
}

TEST(GramSchmidt, RejectsNonOrthonormal) {
  ComplexMatrix bad = ComplexMatrix::Ones(3, 2);
  try {
    gram_schmidt_extend(bad, 3, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrthonormal);
  }
}

TEST(NumericalRank, TrivialCases) {
  Rng rng = make_rng(20);
  ComplexVector v = random_unit_vector(5, rng);
  EXPECT_EQ(numerical_rank(v * v.adjoint(), 1e-10), 1);
  EXPECT_EQ(numerical_rank(ComplexMatrix::Identity(4, 4) / 4.0, 1e-10), 4);
  ComplexMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  EXPECT_THROW(numerical_rank(bad, 1e-10), Error);
}

TEST(RegisterHelpers, ApplyLocalMatchesEmbeddedOperator) {
  Rng rng = make_rng(21);
  ComplexVector v = random_unit_vector(27, rng);
  ComplexMatrix u = random_unitary(9, rng);
  std::vector<int> dims{3, 3, 3};
  std::vector<int> axes{1, 2};
  ComplexVector got = v;
  apply_local(got, 3, 3, axes, u);
  EXPECT_LE(max_abs(got - embed_operator(u, dims, axes) * v), 1e-14);
}

TEST(RegisterHelpers, ProjectAndInsertAreInverse) {
  Rng rng = make_rng(22);
  ComplexVector reduced = random_unit_vector(4, rng);
  std::vector<int> axes{0, 2};
  ComplexVector full = insert_zero_axes(reduced, 2, 4, axes);
  EXPECT_NEAR(full.norm(), 1.0, 1e-14);
  EXPECT_EQ(max_abs(project_zero_remove(full, 2, 4, axes) - reduced), 0.0);
  // |x0 x1 x2 x3> with x0 = x2 = 0 lives at index 4*x1 + x3.
  EXPECT_EQ(full[4 * 1 + 1], reduced[3]);
}

TEST(RegisterHelpers, ReducedFromVectorMatchesPartialTrace) {
  Rng rng = make_rng(23);
  ComplexVector v = random_unit_vector(16, rng);
  std::vector<int> dims{2, 2, 2, 2};
  std::vector<int> axes{1, 3};
  EXPECT_LE(max_abs(reduced_from_vector(v, 2, 4, axes) - partial_trace(v * v.adjoint(), dims, axes)),
            1e-14);
  RealVector s = schmidt_values(v, 2, 4, axes);
  EXPECT_NEAR(s.squaredNorm(), 1.0, 1e-12);
}
