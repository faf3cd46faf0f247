#include <gtest/gtest.h>

#include "oracle.hpp"
#include "sepdistill/instruments.hpp"

using namespace sepdistill;

namespace {

const double h = 1.0 / std::sqrt(2.0);

ComplexMatrix diag(std::vector<Complex> d) { return ComplexMatrix::diagonal(d); }

}  // namespace

TEST(SepFilters, SmallestCaseFirstOperator) {
  const auto inst = make_instrument(Family::Thm1Sep, DimsSpec::from_offsets(2, {1, 1}));
  ASSERT_EQ(inst.kraus.size(), 2u);
  EXPECT_LT((inst.kraus[0].full() - kron(diag({1, h, 0}), diag({h, 1, 0}))).max_abs(), 1e-15);
}

TEST(SepFilters, CoefficientTablesLiteral) {
  const auto t = coefficient_tables(Family::Thm1Sep, DimsSpec::from_offsets(4, {1, 3}));
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].name, "eta");
  EXPECT_EQ(t[0].values, (std::vector<double>{1, h, h, h}));
  EXPECT_EQ(t[1].values, (std::vector<double>{h, 1, 1, 1}));
  EXPECT_EQ(t[2].name, "eta'");
  EXPECT_EQ(t[2].values, (std::vector<double>{h, h, h, 1}));
  EXPECT_EQ(t[3].values, (std::vector<double>{1, 1, 1, h}));

  const auto u = coefficient_tables(Family::Thm2II, DimsSpec::from_offsets(4, {1, 2, 1}));
  ASSERT_EQ(u.size(), 6u);
  EXPECT_EQ(u[0].values, (std::vector<double>{1, h, h, h}));  // alpha
  EXPECT_EQ(u[1].values, (std::vector<double>{h, 1, 1, h}));  // beta
  EXPECT_EQ(u[2].values, (std::vector<double>{h, h, h, 1}));  // gamma
  EXPECT_EQ(u[3].values, (std::vector<double>{h, h, h, 1}));  // alpha'
  EXPECT_EQ(u[4].values, (std::vector<double>{h, 1, 1, h}));  // beta'
  EXPECT_EQ(u[5].values, (std::vector<double>{1, h, h, h}));  // gamma'
}

TEST(LoccMeasurement, TwoByFourOperators) {
  const auto inst = make_instrument(Family::Ex2x4, canonical_spec(Family::Ex2x4, 2));
  ComplexMatrix b1(4, 4), b2(4, 4);
  b1(0, 0) = b1(1, 1) = 1.0;
  b2(0, 2) = b2(1, 3) = 1.0;
  EXPECT_EQ(inst.kraus[0].locals[0], ComplexMatrix::identity(2));
  EXPECT_EQ(inst.kraus[0].locals[1], b1);
  EXPECT_EQ(inst.kraus[1].locals[1], b2);
}

TEST(LoccMeasurement, FoldOperatorOnLargerParty) {
  const auto inst = make_instrument(Family::Thm1Locc, canonical_spec(Family::Thm1Locc, 2));
  ComplexMatrix b2(4, 4);
  b2(0, 2) = b2(1, 3) = 1.0;
  EXPECT_EQ(inst.kraus[1].locals[1], b2);
}

TEST(ProductKraus, FactoredApplyMatchesDenseOracle) {
  const std::vector<std::pair<Family, DimsSpec>> cases{
      {Family::Thm1Sep, DimsSpec::from_offsets(3, {1, 2})},
      {Family::Thm2I, DimsSpec::from_offsets(3, {0, 2, 1})},
      {Family::Thm2II, DimsSpec::from_offsets(3, {1, 1, 1})},
  };
  for (const auto& [f, spec] : cases) {
    const auto inst = make_instrument(f, spec);
    const auto [psi1, psi2] = make_state_pair(f, spec);
    for (const auto& k : inst.kraus) {
      oracle::Mat dense = oracle::to_eigen(k.locals[0]);
      for (std::size_t p = 1; p < k.locals.size(); ++p) dense = oracle::kron(dense, oracle::to_eigen(k.locals[p]));
      for (const auto* psi : {&psi1, &psi2}) {
        const oracle::Vec want = dense * oracle::to_eigen(psi->amplitudes);
        EXPECT_LT((oracle::to_eigen(k.apply(psi->amplitudes, spec.dims)) - want).norm(), 1e-14);
      }
    }
  }
}

TEST(Filtering, IdentitiesAtModerateSizes) {
  EXPECT_LE(check_filtering(Family::Thm1Sep, DimsSpec::from_offsets(5, {2, 3})).max(), 1e-12);
  EXPECT_LE(check_filtering(Family::Thm2I, DimsSpec::from_offsets(4, {0, 3, 1})).max(), 1e-12);
  EXPECT_LE(check_filtering(Family::Thm2II, DimsSpec::from_offsets(4, {2, 1, 1})).max(), 1e-12);
  EXPECT_LE(check_filtering(Family::Thm2III, canonical_spec(Family::Thm2III, 3)).max(), 1e-12);
}

TEST(Instrument, FamiliesWithoutSingleRoundInstrument) {
  EXPECT_THROW(make_instrument(Family::BellMix, canonical_spec(Family::BellMix, 2)), SpecError);
  EXPECT_THROW(make_instrument(Family::ThreeQubit, canonical_spec(Family::ThreeQubit, 2)), SpecError);
}

TEST(Instrument, ValidationCatchesShapeErrors) {
  Instrument bad{{ProductKraus{{ComplexMatrix::identity(2)}}}, {2, 2}};
  EXPECT_THROW(bad.validate(), DimensionError);
  Instrument empty{{}, {2}};
  EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(Protocol, ThreeQubitIsTwoRounds) {
  const auto prog = make_protocol(Family::ThreeQubit, canonical_spec(Family::ThreeQubit, 2));
  EXPECT_EQ(prog.depth(), 2u);
  EXPECT_EQ(prog.rounds[0].party, 2u);
  EXPECT_EQ(prog.rounds[1].measurement.front(), pauli_z());
  EXPECT_EQ(prog.trace_out, (std::vector<std::size_t>{2}));
}

TEST(Protocol, SingleRoundFamilies) {
  const auto locc = make_protocol(Family::Thm1Locc, canonical_spec(Family::Thm1Locc, 3));
  EXPECT_EQ(locc.depth(), 1u);
  EXPECT_EQ(locc.rounds[0].party, 1u);
  for (const auto& o : locc.rounds[0].outcomes) {
    EXPECT_FALSE(o.next);
    EXPECT_TRUE(o.corrections.empty());
  }
  const auto tri = make_protocol(Family::Thm2III, canonical_spec(Family::Thm2III, 2));
  EXPECT_EQ(tri.depth(), 1u);
  EXPECT_EQ(tri.rounds[0].party, 2u);
}

TEST(Protocol, ValidationRejectsIncompleteRound) {
  auto prog = make_protocol(Family::Thm1Locc, canonical_spec(Family::Thm1Locc, 2));
  prog.rounds[0].measurement[0] = prog.rounds[0].measurement[0] * Complex(0.5);
  EXPECT_THROW(validate_program(prog), ProtocolError);
}
