#include <gtest/gtest.h>

#include "sepdistill/analysis.hpp"
#include "sepdistill/states.hpp"

using namespace sepdistill;

TEST(Schmidt, BellState) {
  const auto s = schmidt(ghz(2, 2), {0});
  EXPECT_EQ(s.rank, 2u);
  for (double c : s.coefficients) EXPECT_NEAR(c, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Schmidt, SepFamilySecondStateIsFlat) {
  const auto [psi1, psi2] = make_state_pair(Family::Thm1Sep, DimsSpec::from_offsets(3, {1, 2}));
  const auto s = schmidt(psi2, {0});
  EXPECT_EQ(s.rank, 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(s.coefficients[k], 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Schmidt, GhzAcrossOneParty) {
  EXPECT_EQ(schmidt(ghz(3, 2), {0}).rank, 2u);
  EXPECT_EQ(cut_ranks(ghz(3, 3).amplitudes, {3, 3, 3}), (std::vector<std::size_t>{3, 3, 3}));
}

TEST(Schmidt, CoefficientsSquareToOne) {
  const auto [psi1, psi2] = make_state_pair(Family::Thm2II, DimsSpec::from_offsets(3, {1, 1, 1}));
  for (const auto& cut : single_party_cuts(3)) {
    double total = 0.0;
    for (double c : schmidt(psi1, cut).coefficients) total += c * c;
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(Schmidt, RejectsBadCuts) {
  EXPECT_THROW(schmidt(ghz(3, 2), {}), std::invalid_argument);
  EXPECT_THROW(schmidt(ghz(3, 2), {0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(schmidt(ghz(3, 2), {5}), std::invalid_argument);
}

TEST(OperatorSchmidt, ProductOperatorHasRankOne) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  ComplexMatrix x(3, 3), y(3, 3);
  for (auto& z : x.entries()) z = {g(rng), g(rng)};
  for (auto& z : y.entries()) z = {g(rng), g(rng)};
  EXPECT_EQ(operator_schmidt_rank(kron(x, y), {3, 3}, {0}), 1u);
  EXPECT_EQ(operator_schmidt_rank(ComplexMatrix::identity(4), {2, 2}, {0}), 1u);
}

TEST(OperatorSchmidt, ControlledNot) {
  ComplexMatrix cnot(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  EXPECT_EQ(operator_schmidt_rank(cnot, {2, 2}, {0}), 2u);
}

TEST(Pencil, BellMixtureDropsToRankOne) {
  const auto [psi1, psi2] = make_state_pair(Family::BellMix, canonical_spec(Family::BellMix, 2));
  const auto r = pencil_min_rank(psi1, psi2, {0}, 1000, 1);
  EXPECT_EQ(r.min_rank, 1u);
  EXPECT_NEAR(std::abs(std::abs(r.x / r.y) - 1.0), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(std::pow(r.x / r.y, 2) - 1.0), 0.0, 1e-8);
}

TEST(Pencil, SepPairKeepsFullRank) {
  const auto [psi1, psi2] = make_state_pair(Family::Thm1Sep, DimsSpec::from_offsets(2, {1, 1}));
  EXPECT_EQ(pencil_min_rank(psi1, psi2, {0}, 1000, 3).min_rank, 2u);
}

TEST(Pencil, IdenticalStatesCancel) {
  const auto psi = ghz(2, 2);
  const auto r = pencil_min_rank(psi, psi, {0}, 10, 1);
  EXPECT_EQ(r.min_rank, 0u);
  EXPECT_NEAR(std::abs(r.x + r.y), 0.0, 1e-12);
}

TEST(Pencil, SeedDeterminism) {
  const auto [psi1, psi2] = make_state_pair(Family::Thm2I, DimsSpec::from_offsets(3, {0, 1, 2}));
  const auto a = pencil_min_rank(psi1, psi2, {1}, 200, 9);
  const auto b = pencil_min_rank(psi1, psi2, {1}, 200, 9);
  EXPECT_EQ(a.min_rank, b.min_rank);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

TEST(Bounds, HeadlineClassifications) {
  EXPECT_TRUE(bound_check({BoundKind::BipartiteSep, {3, 3}, 2}));
  EXPECT_FALSE(bound_check({BoundKind::BipartiteLocc, {3, 3}, 2}));
  EXPECT_TRUE(bound_check({BoundKind::BipartiteLocc, {2, 4}, 2}));
  EXPECT_FALSE(bound_check({BoundKind::BipartiteSep, {2, 3}, 2}));
  EXPECT_FALSE(bound_check({BoundKind::BipartiteSep, {2, 2}, 2}));
  EXPECT_FALSE(bound_check({BoundKind::TripartiteSep, {2, 2, 2}, 2}));
}

TEST(Bounds, KindNamesRoundTrip) {
  for (auto k : {BoundKind::BipartiteSep, BoundKind::BipartiteLocc, BoundKind::TripartiteSep,
                 BoundKind::TripartiteLocc, BoundKind::NpartiteSep})
    EXPECT_EQ(parse_bound_kind(bound_kind_name(k)), k);
}
