#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "oracle.hpp"
#include "sepdistill/numlin.hpp"

using namespace sepdistill;

namespace {

ComplexMatrix diag(std::vector<Complex> d) { return ComplexMatrix::diagonal(d); }

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

ComplexMatrix random_hermitian(std::size_t n, unsigned seed) {
  auto a = oracle::random_matrix(n, n, seed);
  return (a + a.adjoint()) * Complex(0.5);
}

}  // namespace

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
}

TEST(Kron, DiagonalSigns) {
  EXPECT_EQ(kron(diag({1, -1}), diag({1, -1})), diag({1, -1, -1, 1}));
}

TEST(Kron, RaisingOperatorOnFirstFactor) {
  ComplexMatrix e01(2, 2);
  e01(0, 1) = 1.0;
  ComplexMatrix want(4, 4);
  want(0, 2) = 1.0;
  want(1, 3) = 1.0;
  EXPECT_EQ(kron(e01, ComplexMatrix::identity(2)), want);
}

TEST(Kron, MatchesEigenOracle) {
  const auto a = oracle::random_matrix(3, 2, 1), b = oracle::random_matrix(2, 4, 2);
  const oracle::Mat want = oracle::kron(oracle::to_eigen(a), oracle::to_eigen(b));
  EXPECT_LT((oracle::to_eigen(kron(a, b)) - want).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Kron, MixedProductProperty) {
  const auto a = oracle::random_matrix(2, 2, 3), b = oracle::random_matrix(3, 3, 4);
  const auto c = oracle::random_matrix(2, 2, 5), e = oracle::random_matrix(3, 3, 6);
  EXPECT_LT(max_diff(kron(a, b) * kron(c, e), kron(a * c, b * e)), 1e-12);
}

TEST(Kron, RefusesOversizedProducts) {
  NumericPolicy small;
  small.max_dimension = 8;
  EXPECT_THROW(kron(ComplexMatrix::identity(3), ComplexMatrix::identity(3), small), DimensionError);
}

TEST(ApplyLocal, AgreesWithDenseKron) {
  const Dims dims{2, 3, 2};
  const auto op = oracle::random_matrix(3, 3, 7);
  auto v = oracle::random_matrix(12, 1, 8);
  Vector psi(v.entries().begin(), v.entries().end());
  const auto full = kron_all(std::vector{ComplexMatrix::identity(2), op, ComplexMatrix::identity(2)});
  EXPECT_LT(distance(apply_local(op, 1, dims, psi), full * std::span<const Complex>(psi)), 1e-13);
}

TEST(Svd, Identity) {
  const auto s = svd(ComplexMatrix::identity(3));
  for (double v : s.singular_values) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(Svd, DiagonalWithZero) {
  const auto s = svd(diag({3, 0}));
  EXPECT_NEAR(s.singular_values[0], 3.0, 1e-15);
  EXPECT_NEAR(s.singular_values[1], 0.0, 1e-15);
}

TEST(Svd, ReshapedBellState) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto s = svd(ComplexMatrix(2, 2, {h, 0, 0, h}));
  EXPECT_NEAR(s.singular_values[0], h, 1e-15);
  EXPECT_NEAR(s.singular_values[1], h, 1e-15);
}

TEST(Svd, MatchesEigenAndReconstructs) {
  for (auto [r, c, seed] : {std::tuple{5u, 3u, 11u}, {3u, 6u, 12u}, {7u, 7u, 13u}}) {
    const auto m = oracle::random_matrix(r, c, seed);
    const auto s = svd(m);
    Eigen::JacobiSVD<oracle::Mat> ref(oracle::to_eigen(m));
    for (std::size_t k = 0; k < s.singular_values.size(); ++k)
      EXPECT_NEAR(s.singular_values[k], ref.singularValues()(k), 1e-12);
    ComplexMatrix sigma(s.singular_values.size(), s.singular_values.size());
    for (std::size_t k = 0; k < s.singular_values.size(); ++k) sigma(k, k) = s.singular_values[k];
    EXPECT_LT(max_diff(s.left * sigma * s.right.adjoint(), m), 1e-12);
    EXPECT_LT(max_diff(s.left.adjoint() * s.left, ComplexMatrix::identity(s.left.cols())), 1e-12);
  }
}

TEST(Svd, RankDeficientKeepsOrthonormalFactors) {
  const auto a = oracle::random_matrix(6, 2, 21), b = oracle::random_matrix(2, 6, 22);
  const auto s = svd(a * b);
  EXPECT_EQ(numerical_rank(s.singular_values, 1e-10), 2u);
  EXPECT_LT(max_diff(s.left.adjoint() * s.left, ComplexMatrix::identity(6)), 1e-12);
}

TEST(HermitianEig, Identity) {
  const auto e = hermitian_eig(ComplexMatrix::identity(2));
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-15);
}

TEST(HermitianEig, DiagonalSortedDescending) {
  const auto e = hermitian_eig(diag({0, 1, 0.5}));
  EXPECT_EQ(e.eigenvalues, (std::vector<double>{1, 0.5, 0}));
}

TEST(HermitianEig, PauliX) {
  const auto e = hermitian_eig(ComplexMatrix(2, 2, {0, 1, 1, 0}));
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues[1], -1.0, 1e-15);
}

TEST(HermitianEig, MatchesEigenOracleAndDiagonalizes) {
  for (unsigned seed : {31u, 32u, 33u}) {
    const auto h = random_hermitian(6, seed);
    const auto e = hermitian_eig(h);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> ref(oracle::to_eigen(h));
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(e.eigenvalues[k], ref.eigenvalues()(5 - k), 1e-12);
    ComplexMatrix lam(6, 6);
    for (std::size_t k = 0; k < 6; ++k) lam(k, k) = e.eigenvalues[k];
    EXPECT_LT(max_diff(e.eigenvectors * lam * e.eigenvectors.adjoint(), h), 1e-12);
  }
}

TEST(HermitianEig, RejectsNonHermitian) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 2, {0, 1, 0, 0})), std::invalid_argument);
}

TEST(PositiveSemidefinite, ShiftedCholesky) {
  EXPECT_TRUE(is_positive_semidefinite(diag({1, 0}), 1e-12));
  EXPECT_FALSE(is_positive_semidefinite(diag({1, -1e-6}), 1e-12));
}

TEST(PartialTrace, BellStateGivesMaximallyMixed) {
  const double h = 1.0 / std::sqrt(2.0);
  const Vector phi{h, 0, 0, h};
  const auto rho = ComplexMatrix::outer(phi, phi);
  EXPECT_LT(max_diff(partial_trace(rho, Dims{2, 2}, {0}), ComplexMatrix::identity(2) * Complex(0.5)), 1e-15);
}

TEST(PartialTrace, ProductStateKeepsFactor) {
  auto a = random_hermitian(2, 41), b = random_hermitian(3, 42);
  a = a * a;
  b = b * b;
  a = a * Complex(1.0 / a.trace().real());
  b = b * Complex(1.0 / b.trace().real());
  EXPECT_LT(max_diff(partial_trace(kron(a, b), Dims{2, 3}, {0}), a), 1e-14);
  EXPECT_LT(max_diff(partial_trace(kron(a, b), Dims{2, 3}, {1}), b), 1e-14);
}

TEST(PartialTrace, GhzKeepsClassicalCorrelation) {
  const double h = 1.0 / std::sqrt(2.0);
  Vector ghz(8);
  ghz[0] = ghz[7] = h;
  const auto rho_ab = partial_trace(ComplexMatrix::outer(ghz, ghz), Dims{2, 2, 2}, {0, 1});
  EXPECT_LT(max_diff(rho_ab, diag({0.5, 0, 0, 0.5})), 1e-15);
}

TEST(PartialTrace, PreservesTraceAndRejectsBadInput) {
  const auto h = random_hermitian(12, 43);
  const auto reduced = partial_trace(h, Dims{2, 3, 2}, {2, 0});
  EXPECT_NEAR(std::abs(reduced.trace() - h.trace()), 0.0, 1e-12);
  EXPECT_THROW(partial_trace(h, Dims{2, 3, 2}, {}), std::invalid_argument);
  EXPECT_THROW(partial_trace(h, Dims{2, 2}, {0}), DimensionError);
}
