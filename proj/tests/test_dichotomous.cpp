#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gibbs/dichotomous.hpp"
#include "gibbs/oracle.hpp"
#include "gibbs/transfer.hpp"

using namespace gibbs;

namespace {

std::vector<int> spins_of(std::size_t idx, std::size_t len) {
  std::vector<int> z(len);
  for (std::size_t i = len; i-- > 0;) {
    z[i] = (idx & 1) ? 1 : -1;
    idx >>= 1;
  }
  return z;
}

std::vector<int> states_of(const std::vector<int>& spins) {
  std::vector<int> s;
  for (int x : spins) s.push_back(x > 0 ? 1 : 0);
  return s;
}

const IsingChainParams kFields[] = {{0.0, 0.0}, {0.3, 0.5}, {-0.7, 0.2}, {1.2, -0.4}, {0.05, 1.5}, {-2.0, -1.0}};

}  // namespace

TEST(Transition, RoundTripsThroughField) {
  for (const auto& fp : kFields) {
    const IsingChainParams back = field_from_transition(transition_from_field(fp));
    EXPECT_NEAR(back.alpha, fp.alpha, 1e-12);
    EXPECT_NEAR(back.beta, fp.beta, 1e-12);
  }
}

TEST(Transition, RowsSumToOne) {
  for (const auto& fp : kFields) {
    const TransitionPair tp = transition_from_field(fp);
    EXPECT_NEAR(tp.p() + tp.one_minus_p(), 1.0, 1e-15);
    EXPECT_NEAR(tp.q() + tp.one_minus_q(), 1.0, 1e-15);
  }
}

TEST(Transition, StrongCouplingKeepsComplements) {
  // p = 1 - 1e-12 cannot be recovered from p itself in double precision.
  const TransitionPair tp = transition_from_field({0.0, 14.0});
  EXPECT_GT(tp.one_minus_p(), 0.0);
  EXPECT_NEAR(tp.one_minus_p() / (std::exp(-28.0) / (1.0 + std::exp(-28.0))), 1.0, 1e-10);
  const IsingChainParams back = field_from_transition(tp);
  EXPECT_NEAR(back.beta, 14.0, 1e-10);
}

TEST(Transition, RejectsDegenerateProbabilities) {
  EXPECT_THROW(TransitionPair(1.0, 0.5), invalid_argument);
  EXPECT_THROW(TransitionPair(0.5, 0.0), invalid_argument);
}

TEST(Thinning, MatchesSquaredTransition) {
  for (const auto& fp : kFields) {
    const IsingChainParams a = thin_once(fp);
    const IsingChainParams b = field_from_transition(transition_from_field(fp).squared());
    EXPECT_NEAR(a.alpha, b.alpha, 1e-12);
    EXPECT_NEAR(a.beta, b.beta, 1e-12);
  }
}

TEST(Thinning, CouplingShrinksTowardZero) {
  const DichotomousLadder ladder = build_ladder({0.2, 0.8}, 12);
  for (std::size_t j = 1; j <= 12; ++j) EXPECT_LE(std::abs(ladder.level(j).beta), std::abs(ladder.level(j + 1).beta));
  for (std::size_t j = 10; j <= 12; ++j) EXPECT_LT(std::abs(ladder.level(j).beta), std::abs(ladder.level(j + 1).beta));
  EXPECT_LT(std::abs(ladder.level(1).beta), 1e-3);
}

TEST(Thinning, FreeFieldIsFixed) {
  const IsingChainParams fp = thin_once({0.4, 0.0});
  EXPECT_NEAR(fp.alpha, 0.4, 1e-15);
  EXPECT_EQ(fp.beta, 0.0);
}

TEST(Ladder, SubsetsAreNested) {
  const DichotomousLadder ladder = build_ladder({0.1, 0.1}, 3);
  EXPECT_EQ(ladder.length(), 9u);
  EXPECT_EQ(ladder.subset(1), (std::vector<std::size_t>{1, 9}));
  EXPECT_EQ(ladder.subset(2), (std::vector<std::size_t>{1, 5, 9}));
  EXPECT_EQ(ladder.subset(3), (std::vector<std::size_t>{1, 3, 5, 7, 9}));
  EXPECT_EQ(ladder.subset(4).size(), 9u);
  EXPECT_EQ(ladder.level(4).alpha, 0.1);
  EXPECT_THROW(ladder.subset(5), invalid_argument);
  EXPECT_THROW(build_ladder({0.1, 0.1}, 0), invalid_argument);
}

TEST(CenterConditional, IsLogistic) {
  const IsingChainParams fp{0.3, -0.6};
  for (int l : {-1, 1})
    for (int r : {-1, 1}) {
      EXPECT_NEAR(center_conditional(fp, l, r, 1) + center_conditional(fp, l, r, -1), 1.0, 1e-15);
      const double f = fp.alpha + fp.beta * (l + r);
      EXPECT_NEAR(center_conditional(fp, l, r, 1), std::exp(f) / (std::exp(f) + std::exp(-f)), 1e-15);
    }
  EXPECT_THROW(center_conditional(fp, 0, 1, 1), invalid_argument);
}

TEST(Pipeline, JointMatchesOracle) {
  for (const auto& fp : kFields)
    for (std::size_t r : {1, 2, 3}) {
      const DichotomousPipeline pipe(fp, r);
      const std::size_t T = pipe.ladder().length();
      double total = 0.0;
      const MarginalTable all = [&] {
        std::vector<std::size_t> sites;
        for (std::size_t t = 1; t <= T; ++t) sites.push_back(t);
        return brute_marginal_table(pipe.chain(), sites);
      }();
      for (std::size_t idx = 0; idx < (std::size_t{1} << T); ++idx) {
        const auto z = spins_of(idx, T);
        const double p = pipe.joint(z);
        EXPECT_NEAR(p, all.probs[idx], 1e-12);
        total += p;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Pipeline, LevelMarginalsMatchSubsetMarginals) {
  const IsingChainParams fp{0.4, 0.7};
  const DichotomousPipeline pipe(fp, 4);
  for (std::size_t j = 1; j <= 5; ++j) {
    const auto sites = pipe.ladder().subset(j);
    if (sites.size() > 9) continue;
    const MarginalTable tab = subset_marginal(pipe.chain(), sites);
    for (std::size_t idx = 0; idx < tab.probs.size(); ++idx)
      EXPECT_NEAR(pipe.marginal(j, spins_of(idx, sites.size())), tab.probs[idx], 1e-12) << j;
  }
}

TEST(Pipeline, ConstantMatchesChain) {
  for (const auto& fp : kFields)
    for (std::size_t r : {1, 3, 6, 10}) {
      const DichotomousPipeline pipe(fp, r);
      const LogValue a = pipe.constant();
      const LogValue b = normalizing_constant(pipe.chain());
      EXPECT_NEAR(a.log_magnitude(), b.log_magnitude(), 1e-9 * std::max(1.0, std::abs(b.log_magnitude())));
    }
}

TEST(Pipeline, ZeroFieldGivesUniformLaw) {
  const DichotomousPipeline pipe({0.0, 0.0}, 3);
  EXPECT_NEAR(pipe.constant().to_double(), 512.0, 1e-9);
  EXPECT_NEAR(pipe.joint(spins_of(77, 9)), 1.0 / 512.0, 1e-15);
}

TEST(Pipeline, EnergyAndStatesAgree) {
  const DichotomousPipeline pipe({0.3, -0.2}, 2);
  const auto z = spins_of(13, 5);
  double u = 0.0;
  for (std::size_t s = 0; s + 1 < z.size(); ++s) u += 0.3 * z[s] - 0.2 * z[s] * z[s + 1];
  EXPECT_NEAR(energy(pipe.chain(), states_of(z)), u, 1e-15);
}

TEST(Pipeline, Errors) {
  const DichotomousPipeline pipe({0.1, 0.2}, 2);
  EXPECT_THROW(pipe.joint(std::vector<int>(4, 1)), invalid_argument);
  EXPECT_THROW(pipe.marginal(2, std::vector<int>(2, 1)), invalid_argument);
  EXPECT_THROW(pipe.marginal(0, std::vector<int>(2, 1)), invalid_argument);
  EXPECT_THROW(pipe.joint(std::vector<int>{1, 0, 1, 1, 1}), invalid_argument);
}
