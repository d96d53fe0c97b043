#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gibbs/model.hpp"
#include "gibbs/random_models.hpp"

using namespace gibbs;

namespace {

// Example 1 on {0, 1}: theta_t(u) = a u, psi(u, v) = b u v.
SingletonPairModel example1_singleton_pair(std::size_t T, double a = 1.0, double b = -0.8) {
  return {2, T, StepSequence<std::vector<double>>::repeated({0.0, a}, T),
          StepSequence<Table>::repeated(Table(2, 2, {0.0, 0.0, 0.0, b}), T - 1)};
}

ChainModel example1_chain(std::size_t T, double a = 1.0, double b = -0.8) {
  Table h(2, 2), last(2, 2);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      h(u, v) = a * u + b * u * v;
      last(u, v) = a * u + b * u * v + a * v;
    }
  return {2, T, StepSequence<Table>::repeated(h, T - 1, last)};
}

std::vector<int> decode(std::size_t idx, std::size_t n, std::size_t len) {
  std::vector<int> z(len);
  for (std::size_t i = len; i-- > 0;) {
    z[i] = static_cast<int>(idx % n);
    idx /= n;
  }
  return z;
}

}  // namespace

TEST(ChainModel, ValidatesShape) {
  EXPECT_THROW(ChainModel(2, 1, StepSequence<Table>::from_list({})), invalid_model);
  EXPECT_THROW(ChainModel(2, 3, StepSequence<Table>::from_list({Table(2, 2)})), invalid_model);
  EXPECT_THROW(ChainModel(2, 2, StepSequence<Table>::from_list({Table(3, 3)})), invalid_model);
  EXPECT_THROW(ChainModel(2, 2, StepSequence<Table>::from_list({Table(2, 2, {0, 0, INFINITY, 0})})), invalid_model);
  EXPECT_THROW(ChainModel(2, 2, StepSequence<Table>::from_list({Table(2, 2, {0, NAN, 0, 0})})), invalid_model);
  EXPECT_THROW(ChainModel(2, 2, StepSequence<Table>::from_list({Table(2, 2)}), {"a"}), invalid_model);
}

TEST(ChainModel, HomogeneousStoresOneTable) {
  const ChainModel m = ChainModel::homogeneous(2, 1000000, Table(2, 2, {0, 1, 2, 3}));
  EXPECT_EQ(m.log_potentials().size(), 999999u);
  EXPECT_EQ(m.log_potentials().distinct().size(), 1u);
  EXPECT_EQ(m.h(777777)(1, 0), 2.0);
}

TEST(Energy, ZeroPotentialsGiveZero) {
  const ChainModel m = ChainModel::homogeneous(3, 5, Table(3, 3));
  const std::vector<int> z = {0, 2, 1, 1, 2};
  EXPECT_EQ(energy(m, z), 0.0);
}

TEST(Energy, Example1HandValue) {
  const std::vector<int> z = {1, 1, 0};
  EXPECT_NEAR(energy(example1_chain(3), z), 1.2, 1e-15);
  EXPECT_NEAR(energy(example1_singleton_pair(3), z), 1.2, 1e-15);
}

TEST(Energy, RejectsBadConfigurations) {
  const ChainModel m = example1_chain(4);
  const std::vector<int> short_z = {0, 1, 0};
  const std::vector<int> bad_state = {0, 1, 2, 0};
  const std::vector<int> negative = {0, -1, 0, 0};
  EXPECT_THROW(energy(m, short_z), invalid_argument);
  EXPECT_THROW(energy(m, bad_state), invalid_argument);
  EXPECT_THROW(energy(m, negative), invalid_argument);
}

TEST(ToChainForm, ZeroModelGivesZeroTables) {
  const SingletonPairModel sp(3, 6, StepSequence<std::vector<double>>::repeated(std::vector<double>(3, 0.0), 6),
                              StepSequence<Table>::repeated(Table(3, 3), 5));
  const ChainModel c = to_chain_form(sp);
  for (std::size_t s = 1; s < 6; ++s)
    for (double v : c.h(s).values()) EXPECT_EQ(v, 0.0);
}

TEST(ToChainForm, Example1Tables) {
  const double a = 1.0, b = -0.8;
  const ChainModel c = to_chain_form(example1_singleton_pair(7, a, b));
  for (std::size_t s = 1; s <= 6; ++s)
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v) {
        const double expect = a * u + b * u * v + (s == 6 ? a * v : 0.0);
        EXPECT_DOUBLE_EQ(c.h(s)(u, v), expect) << "s=" << s;
      }
  // Homogeneous storage survives the conversion.
  EXPECT_TRUE(c.log_potentials().is_repeated());
  EXPECT_EQ(c.log_potentials().distinct().size(), 2u);
}

TEST(ToChainForm, RandomEnergyMatchesDirectSum) {
  ModelSampler s(11);
  const SingletonPairModel sp = s.singleton_pair(2, 5);
  const ChainModel c = to_chain_form(sp);
  for (std::size_t idx = 0; idx < 32; ++idx) {
    const auto z = decode(idx, 2, 5);
    double direct = 0.0;
    for (std::size_t t = 1; t <= 5; ++t) direct += sp.theta(t, z[t - 1]);
    for (std::size_t t = 1; t < 5; ++t) direct += sp.psi(t, z[t - 1], z[t]);
    EXPECT_NEAR(energy(c, z), direct, 1e-12);
  }
}

TEST(ToChainForm, EnergyIsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelSampler s(seed);
    const std::size_t n = s.integer(2, 4), T = s.integer(2, 7);
    const SingletonPairModel sp = s.singleton_pair(n, T);
    const ChainModel c = to_chain_form(sp);
    for (int k = 0; k < 50; ++k) {
      std::vector<int> z(T);
      for (int& x : z) x = static_cast<int>(s.integer(0, n - 1));
      EXPECT_EQ(energy(sp, z), energy(c, z));
    }
  }
}

TEST(FromChainForm, RoundTripsEnergy) {
  ModelSampler s(3);
  const ChainModel c = s.chain(3, 6);
  const SingletonPairModel sp = from_chain_form(c);
  for (std::size_t idx = 0; idx < 729; ++idx) {
    const auto z = decode(idx, 3, 6);
    EXPECT_NEAR(energy(sp, z), energy(c, z), 1e-13);
  }
}

TEST(UnnormalizedDensity, ZeroPotentialsGiveOne) {
  const ChainModel m = ChainModel::homogeneous(2, 4, Table(2, 2));
  const std::vector<int> z = {0, 1, 1, 0};
  const LogValue d = unnormalized_density(m, z);
  EXPECT_FALSE(d.is_zero());
  EXPECT_EQ(d.log_magnitude(), 0.0);
}

TEST(UnnormalizedDensity, LogEqualsEnergy) {
  ModelSampler s(5, 50.0);
  for (int k = 0; k < 100; ++k) {
    const ChainModel m = s.chain(s.integer(2, 4), s.integer(2, 12));
    std::vector<int> z(m.length());
    for (int& x : z) x = static_cast<int>(s.integer(0, m.n_states() - 1));
    EXPECT_NEAR(unnormalized_density(m, z).log_magnitude(), energy(m, z), 1e-12);
  }
}

TEST(RRangeModel, FactorLookupIsLexicographic) {
  std::vector<double> f(8);
  for (std::size_t i = 0; i < 8; ++i) f[i] = static_cast<double>(i);
  const RRangeModel m(2, 4, 2, StepSequence<std::vector<double>>::repeated(f, 2));
  const std::vector<int> w = {1, 0, 1};
  EXPECT_EQ(m.factor(1, w), 5.0);
  const std::vector<int> z = {1, 0, 1, 1};
  EXPECT_EQ(energy(m, z), 5.0 + 3.0);
  EXPECT_THROW(RRangeModel(2, 2, 2, StepSequence<std::vector<double>>::repeated(f, 0)), invalid_model);
  EXPECT_THROW(RRangeModel(2, 4, 2, StepSequence<std::vector<double>>::repeated(std::vector<double>(7), 2)),
               invalid_model);
}
