#include <gtest/gtest.h>

#include "sepdistill/instruments.hpp"
#include "sepdistill/json_io.hpp"
#include "sepdistill/search.hpp"

using namespace sepdistill;

namespace {

struct Pair {
  PureState psi1, psi2;
};

Pair pair_of(Family f, const DimsSpec& s) {
  auto [a, b] = make_state_pair(f, s);
  return {a, b};
}

Instrument zero_padded(Instrument inst) {
  ProductKraus zero;
  for (auto n : inst.dims) zero.locals.emplace_back(n, n);
  inst.kraus.push_back(std::move(zero));
  return inst;
}

SearchConfig small_config() {
  SearchConfig cfg;
  cfg.restarts = 3;
  cfg.max_iterations = 1500;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST(Residual, LiftedLoccPairIsExact) {
  const auto spec = canonical_spec(Family::Thm1Locc, 2);
  const auto p = pair_of(Family::Thm1Locc, spec);
  const auto lifted = lift_single_round(make_protocol(Family::Thm1Locc, spec));
  EXPECT_LE(residual(lifted, p.psi1, p.psi2, p.psi1), 1e-20);
}

TEST(Residual, PrintedSepPairIsBoundedAway) {
  const auto spec = DimsSpec::from_offsets(2, {1, 1});
  const auto p = pair_of(Family::Thm1Sep, spec);
  EXPECT_GT(residual(make_instrument(Family::Thm1Sep, spec), p.psi1, p.psi2, p.psi1), 0.2);
}

TEST(Residual, IdentityOnCoincidingStates) {
  const auto psi = ghz(2, 2);
  Instrument id{{ProductKraus{{ComplexMatrix::identity(2), ComplexMatrix::identity(2)}}}, {2, 2}};
  EXPECT_LE(residual(id, psi, psi, psi), 1e-28);
}

TEST(Residual, NonNegativeOnRandomCandidates) {
  const auto p = pair_of(Family::BellMix, canonical_spec(Family::BellMix, 2));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(detail::parameter_count({2, 2}, 2));
    for (auto& v : x) v = g(rng);
    EXPECT_GE(residual(detail::unpack(x, {2, 2}, 2), p.psi1, p.psi2, p.psi1), 0.0);
  }
}

TEST(Search, WarmStartedLoccLiftIsFeasible) {
  const auto spec = canonical_spec(Family::Thm1Locc, 2);
  const auto p = pair_of(Family::Thm1Locc, spec);
  const auto lifted = lift_single_round(make_protocol(Family::Thm1Locc, spec));
  const auto r = sep_feasibility_search(p.psi1, p.psi2, p.psi1, small_config(), lifted);
  EXPECT_EQ(r.verdict, SearchVerdict::Feasible);
  EXPECT_LE(r.best_residual, 1e-12);
  EXPECT_EQ(r.reverified_completeness, Completeness::Complete);
  EXPECT_EQ(r.reverified_distillation, DistillationVerdict::Deterministic);
}

TEST(Search, SameSeedSameResultAcrossThreadCounts) {
  const auto p = pair_of(Family::BellMix, canonical_spec(Family::BellMix, 2));
  auto cfg = small_config();
  cfg.threads = 1;
  const auto a = sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg);
  cfg.threads = 3;
  const auto b = sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg);
  EXPECT_EQ(dump17(to_json(a)), dump17(to_json(b)));
}

TEST(Search, WarmStartNeverWorsens) {
  const auto spec = DimsSpec::from_offsets(2, {1, 1});
  const auto p = pair_of(Family::Thm1Sep, spec);
  const auto printed = make_instrument(Family::Thm1Sep, spec);
  auto cfg = small_config();
  cfg.restarts = 1;
  const double start = residual(printed, p.psi1, p.psi2, p.psi1);
  const auto r = sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg, printed);
  EXPECT_LE(r.restart_residuals[0], start);
  // Traces record best-so-far values, so they never increase.
  for (const auto& trace : r.restart_traces)
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]);
}

TEST(Search, ExtraZeroOperatorIsNonWorse) {
  const auto p = pair_of(Family::BellMix, canonical_spec(Family::BellMix, 2));
  auto cfg = small_config();
  cfg.restarts = 1;
  const auto t2 = sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg);
  cfg.kraus_count = 3;
  const auto t3 = sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg, zero_padded(t2.best_candidate));
  EXPECT_LE(t3.best_residual, t2.best_residual);
}

TEST(Search, BellMixtureIsInconclusive) {
  const auto p = pair_of(Family::BellMix, canonical_spec(Family::BellMix, 2));
  const auto r = sep_feasibility_search(p.psi1, p.psi2, p.psi1, small_config());
  EXPECT_EQ(r.verdict, SearchVerdict::Inconclusive);
  EXPECT_GT(r.best_residual, 1e-3);
}

TEST(Search, ConfigValidation) {
  SearchConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.weights.determinism = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  const auto p = pair_of(Family::BellMix, canonical_spec(Family::BellMix, 2));
  cfg = {};
  cfg.kraus_count = 1;
  const ProductKraus id{{ComplexMatrix::identity(2), ComplexMatrix::identity(2)}};
  const Instrument two{{id, id}, {2, 2}};
  EXPECT_THROW(sep_feasibility_search(p.psi1, p.psi2, p.psi1, cfg, two), std::invalid_argument);
}
