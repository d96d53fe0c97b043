#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gibbs/future.hpp"
#include "gibbs/oracle.hpp"
#include "gibbs/random_models.hpp"
#include "gibbs/transfer.hpp"

using namespace gibbs;

namespace {

SingletonPairModel example1(std::size_t T, double a = 1.0, double b = -0.8) {
  return {2, T, StepSequence<std::vector<double>>::repeated({0.0, a}, T),
          StepSequence<Table>::repeated(Table(2, 2, {0.0, 0.0, 0.0, b}), T - 1)};
}

std::vector<int> decode(std::size_t idx, std::size_t n, std::size_t len) {
  std::vector<int> z(len);
  for (std::size_t i = len; i-- > 0;) {
    z[i] = static_cast<int>(idx % n);
    idx /= n;
  }
  return z;
}

std::size_t ipow(std::size_t n, std::size_t k) {
  std::size_t p = 1;
  while (k--) p *= n;
  return p;
}

double log_gap(LogValue a, LogValue b) { return std::abs(a.log_magnitude() - b.log_magnitude()); }

}  // namespace

TEST(FutureConstant, ZeroModel) {
  const SingletonPairModel m(3, 5, StepSequence<std::vector<double>>::repeated(std::vector<double>(3, 0.0), 5),
                             StepSequence<Table>::repeated(Table(3, 3), 4));
  EXPECT_NEAR(constant_via_future(m).to_double(), 243.0, 1e-10);
}

TEST(FutureConstant, Example1MatchesChainSweep) {
  for (std::size_t T : {2, 10, 25, 500}) {
    const SingletonPairModel m = example1(T);
    EXPECT_LE(log_gap(constant_via_future(m), normalizing_constant(to_chain_form(m))), 1e-10 * T) << T;
  }
  EXPECT_EQ(constant_via_future(example1(10)).scientific(), "3.3441E+04");
}

TEST(FutureConstant, RandomModelsMatchOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ModelSampler s(seed, 2.0);
    const std::size_t n = s.integer(2, 3), T = s.integer(2, 7);
    const SingletonPairModel m = s.singleton_pair(n, T);
    EXPECT_LE(log_gap(constant_via_future(m), brute_constant(m)), 1e-12) << seed;
  }
}

TEST(FutureConstant, LongChainAgreesWithPower) {
  const SingletonPairModel m = example1(100000);
  const LogValue a = constant_via_future(m);
  const LogValue b = normalizing_constant(to_chain_form(m), ConstantMethod::power);
  EXPECT_LE(log_gap(a, b) / b.log_magnitude(), 1e-13);
}

TEST(FutureVectors, TerminalIsFirstUnitVector) {
  ModelSampler s(1);
  const FutureConditional fc(s.singleton_pair(3, 4));
  EXPECT_EQ(fc.d(4).mantissa(0), 1.0);
  EXPECT_EQ(fc.d(4).mantissa(1), 0.0);
  EXPECT_EQ(fc.d(4).mantissa(2), 0.0);
  EXPECT_EQ(fc.d(4).log_scale(), 0.0);
}

TEST(FutureVectors, OneStepByHand) {
  ModelSampler s(2);
  const SingletonPairModel m = s.singleton_pair(2, 3);
  const FutureConditional fc(m);
  // D_2(u) = H_3(u, 0) = exp theta_3(u), psi_3 being zero.
  for (std::size_t u = 0; u < 2; ++u) EXPECT_NEAR(fc.d(2).entry(u).to_double(), std::exp(m.theta(3, u)), 1e-13);
}

TEST(FutureMarginal, MatchesChainPrefixAndOracle) {
  ModelSampler s(3);
  const SingletonPairModel m = s.singleton_pair(3, 6);
  const ChainModel c = to_chain_form(m);
  const FutureConditional fc(m);
  for (std::size_t t = 1; t <= 6; ++t) {
    std::vector<std::size_t> sites;
    for (std::size_t i = 1; i <= t; ++i) sites.push_back(i);
    const MarginalTable oracle = brute_marginal_table(m, sites);
    double total = 0.0;
    for (std::size_t idx = 0; idx < ipow(3, t); ++idx) {
      const auto z = decode(idx, 3, t);
      const double p = fc.marginal(z);
      EXPECT_NEAR(p, oracle.probs[idx], 1e-12);
      EXPECT_NEAR(p, prefix_marginal(c, t, z), 1e-12);
      total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(FutureMarginal, ConditionalsFromRatiosSumToOne) {
  ModelSampler s(4, 3.0);
  const SingletonPairModel m = s.singleton_pair(4, 9);
  const FutureConditional fc(m);
  std::vector<int> prefix = {2, 0, 3};
  double total = 0.0;
  const double base = fc.marginal(prefix);
  for (int u = 0; u < 4; ++u) {
    prefix.push_back(u);
    total += fc.marginal(prefix) / base;
    prefix.pop_back();
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(FutureMarginal, GammaStepMatchesFromScratch) {
  ModelSampler s(5);
  const SingletonPairModel m = s.singleton_pair(3, 8);
  const std::vector<int> z = {1, 2, 0, 0, 1, 2, 2, 1};
  GammaVector g = gamma_init(m, z[0]);
  for (std::size_t t = 2; t <= 8; ++t) {
    g = gamma_step(g, z[t - 1], m, t);
    const GammaVector fresh = gamma_of_prefix(m, std::span<const int>(z.data(), t));
    for (std::size_t u = 0; u < 3; ++u) EXPECT_NEAR(g.values.log_entry(u), fresh.values.log_entry(u), 1e-12);
  }
}

TEST(FutureMarginal, Errors) {
  const SingletonPairModel m = example1(4);
  const int bad[] = {0, 2};
  const int ok[] = {0, 1};
  EXPECT_THROW(marginal_via_future(m, 2, bad), invalid_argument);
  EXPECT_THROW(marginal_via_future(m, 3, ok), invalid_argument);
  const GammaVector g = gamma_init(m, 0);
  EXPECT_THROW(gamma_step(g, 0, m, 3), invalid_argument);
  EXPECT_THROW(gamma_init(m, -1), invalid_argument);
}

TEST(TwoLag, ConstantMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelSampler s(seed);
    const std::size_t n = s.integer(2, 3), T = s.integer(3, 7);
    const TwoLagModel m = s.two_lag(n, T);
    EXPECT_LE(log_gap(two_lag_constant(m), brute_constant(m)), 1e-12) << seed;
  }
}

TEST(TwoLag, ConstantMatchesRangeTwoLift) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelSampler s(seed + 100);
    const TwoLagModel m = s.two_lag(3, 30);
    EXPECT_LE(log_gap(two_lag_constant(m), normalizing_constant(lift_r_range(to_r_range(m)))), 1e-11) << seed;
  }
}

TEST(TwoLag, ZeroSecondLagReducesToPairModel) {
  ModelSampler s(6);
  const TwoLagModel m = s.two_lag(3, 12, true);
  std::vector<std::vector<double>> theta;
  std::vector<Table> psi;
  for (std::size_t t = 1; t <= 12; ++t) {
    std::vector<double> v(3);
    for (std::size_t u = 0; u < 3; ++u) v[u] = m.theta(t, u);
    theta.push_back(v);
  }
  for (std::size_t t = 1; t < 12; ++t) {
    Table p(3, 3);
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t v = 0; v < 3; ++v) p(u, v) = m.psi1(t, u, v);
    psi.push_back(p);
  }
  const SingletonPairModel sp(3, 12, StepSequence<std::vector<double>>::from_list(theta),
                              StepSequence<Table>::from_list(psi));
  EXPECT_LE(log_gap(two_lag_constant(m), constant_via_future(sp)), 1e-12);
  const int prefix[] = {0, 2, 1, 1};
  EXPECT_NEAR(two_lag_marginal(m, 4, prefix), marginal_via_future(sp, 4, prefix), 1e-12);
}

TEST(TwoLag, MarginalsMatchOracle) {
  ModelSampler s(7, 1.5);
  const TwoLagModel m = s.two_lag(2, 7);
  const TwoLagRecursion rec(m);
  for (std::size_t t = 1; t <= 7; ++t) {
    std::vector<std::size_t> sites;
    for (std::size_t i = 1; i <= t; ++i) sites.push_back(i);
    const MarginalTable oracle = brute_marginal_table(m, sites);
    for (std::size_t idx = 0; idx < ipow(2, t); ++idx)
      EXPECT_NEAR(rec.marginal(decode(idx, 2, t)), oracle.probs[idx], 1e-12);
  }
}

TEST(TwoLag, EnergyOfRangeTwoFormIsIdentical) {
  ModelSampler s(8);
  const TwoLagModel m = s.two_lag(3, 6);
  const RRangeModel r = to_r_range(m);
  for (std::size_t idx = 0; idx < 729; idx += 5) {
    const auto z = decode(idx, 3, 6);
    EXPECT_NEAR(energy(r, z), energy(m, z), 1e-12);
  }
}

TEST(TwoLag, LongChainIsFinite) {
  ModelSampler s(9, 2.0);
  const TwoLagModel m = s.two_lag(2, 20000);
  const LogValue c = two_lag_constant(m);
  EXPECT_TRUE(std::isfinite(c.log_magnitude()));
  EXPECT_GT(c.log10(), 308.0);
}

TEST(TwoLag, CapsAndShape) {
  ModelSampler s(10);
  Limits tight;
  tight.max_states = 8;
  EXPECT_THROW(TwoLagRecursion(s.two_lag(3, 5), tight), capacity_exceeded);
  EXPECT_THROW(s.two_lag(2, 2), invalid_model);
}
