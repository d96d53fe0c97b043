#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gibbs/oracle.hpp"
#include "gibbs/random_models.hpp"
#include "gibbs/spatial.hpp"

using namespace gibbs;

namespace {

double log_gap(LogValue a, LogValue b) { return std::abs(a.log_magnitude() - b.log_magnitude()); }

// Lattice field with column t equal to cols[t-1] (bit i = row i).
std::vector<int> field_of(const std::vector<std::uint32_t>& cols, std::size_t m) {
  std::vector<int> z;
  for (std::uint32_t c : cols)
    for (std::size_t i = 0; i < m; ++i) z.push_back((c >> i) & 1u);
  return z;
}

const SpatialIsingModel kSmall[] = {
    {2, 3, 0.5, 0.3, -0.2}, {3, 4, 0.5, 0.3, -0.2}, {3, 2, -0.1, 0.9, 0.4}, {1, 6, 0.3, 0.0, 0.7}, {4, 3, 0.0, -0.5, 1.1},
};

}  // namespace

TEST(SliceStatistics, HandCounts) {
  // c = 0b0110 on m = 4: rows 1, 2 up; vertical pairs (0,1) differ, (1,2) agree, (2,3) differ.
  const SliceStatistics s = slice_statistics(0b0110, 0b0011, 4);
  EXPECT_EQ(s.n_plus, 2);
  EXPECT_EQ(s.n_minus, 2);
  EXPECT_EQ(s.v_plus, 1);
  EXPECT_EQ(s.v_minus, 2);
  EXPECT_EQ(s.n_agree, 2);
  EXPECT_EQ(s.n_disagree, 2);
}

TEST(SliceStatistics, CountsAddUp) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::uint32_t c = 0; c < (1u << m); ++c)
      for (std::uint32_t d = 0; d < (1u << m); d += 3) {
        const SliceStatistics s = slice_statistics(c, d, m);
        EXPECT_EQ(s.n_plus + s.n_minus, static_cast<int>(m));
        EXPECT_EQ(s.v_plus + s.v_minus, static_cast<int>(m) - 1);
        EXPECT_EQ(s.n_agree + s.n_disagree, static_cast<int>(m));
        EXPECT_EQ(slice_statistics(c, c, m).n_agree, static_cast<int>(m));
      }
}

TEST(SpatialModel, Validation) {
  EXPECT_THROW((SpatialIsingModel{0, 3, 0, 0, 0}).validate(), invalid_model);
  EXPECT_THROW((SpatialIsingModel{2, 1, 0, 0, 0}).validate(), invalid_model);
  EXPECT_THROW((SpatialIsingModel{31, 3, 0, 0, 0}).validate(), invalid_model);
  EXPECT_THROW((SpatialIsingModel{2, 3, NAN, 0, 0}).validate(), invalid_model);
}

TEST(SpatialTransfer, EntriesMatchDefinition) {
  const SpatialIsingModel sm{3, 5, 0.4, -0.3, 0.25};
  const ScaledNonNegMatrix h = build_spatial_transfer(sm, 2);
  const ScaledNonNegMatrix last = build_spatial_transfer(sm, 5);
  for (std::uint32_t u = 0; u < 8; ++u)
    for (std::uint32_t v = 0; v < 8; ++v) {
      const SliceStatistics s = slice_statistics(u, v, 3);
      const double expect = column_log_weight(sm, u) + sm.delta * (s.n_agree - s.n_disagree);
      EXPECT_NEAR(h.log_entry(u, v), expect, 1e-13);
      EXPECT_NEAR(last.log_entry(u, v), column_log_weight(sm, u), 1e-13);
    }
  EXPECT_THROW(build_spatial_transfer(sm, 0), invalid_argument);
  EXPECT_THROW(build_spatial_transfer(sm, 6), invalid_argument);
}

TEST(SpatialTransfer, ColumnSequenceEnergyMatchesLattice) {
  const SpatialIsingModel sm{3, 4, 0.5, 0.3, -0.2};
  const std::vector<std::uint32_t> cols = {5, 0, 7, 2};
  double u = 0.0;
  for (std::size_t t = 1; t < 4; ++t) u += build_spatial_transfer(sm, t).log_entry(cols[t - 1], cols[t]);
  u += column_log_weight(sm, cols[3]);
  EXPECT_NEAR(u, lattice_energy(sm, field_of(cols, 3)), 1e-13);
}

TEST(SpatialConstant, ZeroFieldCountsConfigurations) {
  const SpatialIsingModel sm{3, 4, 0.0, 0.0, 0.0};
  EXPECT_NEAR(spatial_constant(sm).to_double(), 4096.0, 1e-9);
  EXPECT_NEAR(spatial_constant_dense(sm, ConstantMethod::sweep).to_double(), 4096.0, 1e-9);
}

TEST(SpatialConstant, AllPathsMatchOracle) {
  for (const auto& sm : kSmall) {
    const LogValue oracle = brute_constant(sm);
    EXPECT_LE(log_gap(spatial_constant(sm, SweepDirection::right_to_left), oracle), 1e-12);
    EXPECT_LE(log_gap(spatial_constant(sm, SweepDirection::left_to_right), oracle), 1e-12);
    for (auto method : {ConstantMethod::sweep, ConstantMethod::power, ConstantMethod::eig})
      EXPECT_LE(log_gap(spatial_constant_dense(sm, method), oracle), 1e-11);
  }
}

TEST(SpatialConstant, SingleRowIsAChain) {
  const SpatialIsingModel sm{1, 40, 0.3, 0.0, 0.7};
  Table h(2, 2), last(2, 2);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      const double su = u ? 1 : -1, sv = v ? 1 : -1;
      h(u, v) = sm.alpha * su + sm.delta * su * sv;
      last(u, v) = h(u, v) + sm.alpha * sv;
    }
  const ChainModel c(2, 40, StepSequence<Table>::repeated(h, 39, last));
  EXPECT_LE(log_gap(spatial_constant(sm), normalizing_constant(c)), 1e-11);
}

TEST(SpatialConstant, DirectionsAgreeOnLargeColumns) {
  const SpatialIsingModel sm{14, 200, 0.1, 0.25, -0.35};
  const LogValue a = spatial_constant(sm, SweepDirection::right_to_left);
  const LogValue b = spatial_constant(sm, SweepDirection::left_to_right);
  EXPECT_TRUE(std::isfinite(a.log_magnitude()));
  EXPECT_LE(log_gap(a, b) / a.log_magnitude(), 1e-13);
}

TEST(SpatialConstant, MatchesDenseOnMidSizes) {
  for (std::size_t m : {5, 8}) {
    const SpatialIsingModel sm{m, 300, -0.2, 0.4, 0.3};
    const LogValue kron = spatial_constant(sm);
    EXPECT_LE(log_gap(kron, spatial_constant_dense(sm, ConstantMethod::sweep)) / kron.log_magnitude(), 1e-12);
    EXPECT_LE(log_gap(kron, spatial_constant_dense(sm, ConstantMethod::power)) / kron.log_magnitude(), 1e-12);
  }
}

TEST(SpatialConstant, Caps) {
  const SpatialIsingModel sm{13, 3, 0.1, 0.1, 0.1};
  EXPECT_THROW(spatial_constant_dense(sm, ConstantMethod::sweep), capacity_exceeded);
  Limits tight;
  tight.max_column_states = 1024;
  EXPECT_THROW(spatial_constant(sm, SweepDirection::right_to_left, tight), capacity_exceeded);
  EXPECT_NO_THROW(spatial_constant(sm));
}

TEST(SpatialMarginal, MatchesOracle) {
  for (const auto& sm : kSmall) {
    for (const std::vector<std::size_t>& cols : {std::vector<std::size_t>{1}, {sm.T}, {1, sm.T}}) {
      const MarginalTable a = spatial_subset_marginal(sm, cols);
      const MarginalTable b = brute_column_marginal_table(sm, cols);
      ASSERT_EQ(a.probs.size(), b.probs.size());
      for (std::size_t i = 0; i < a.probs.size(); ++i) EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
    }
  }
}

TEST(SpatialMarginal, FlipSymmetryWithoutField) {
  const SpatialIsingModel sm{3, 6, 0.0, 0.6, 0.45};
  const std::size_t cols[] = {2, 5};
  const MarginalTable tab = spatial_subset_marginal(sm, cols);
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      const int a[] = {u, v};
      const int b[] = {7 - u, 7 - v};
      EXPECT_NEAR(tab.at(a), tab.at(b), 1e-13);
    }
  const int one[] = {3, 4};
  EXPECT_NEAR(spatial_subset_marginal(sm, cols, one), tab.at(one), 0.0);
}

TEST(SliceLift, IsingSliceEnergyMatchesLattice) {
  const SpatialIsingModel sm{3, 4, 0.5, 0.3, -0.2};
  const SlicePotentialModel spm = ising_slice_model(sm);
  for (std::uint32_t k = 0; k < 4096; k += 37) {
    const std::vector<std::uint32_t> cols = {k & 7u, (k >> 3) & 7u, (k >> 6) & 7u, (k >> 9) & 7u};
    EXPECT_NEAR(energy(spm, cols), lattice_energy(sm, field_of(cols, 3)), 1e-13);
  }
}

TEST(SliceLift, IsingSliceConstant) {
  for (const auto& sm : kSmall) {
    const SlicePotentialModel spm = ising_slice_model(sm);
    const LogValue lifted = normalizing_constant(lift_r_range(lift_slice_model(spm)));
    EXPECT_LE(log_gap(lifted, spatial_constant(sm)), 1e-12);
    EXPECT_LE(log_gap(brute_constant(spm), brute_constant(sm)), 1e-12);
  }
}

TEST(SliceLift, RangeTwoRandomPotentialsMatchOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelSampler s(seed);
    SlicePotentialModel spm;
    spm.m = 2;
    spm.T = 5;
    spm.f_size = 2;
    spm.r = 2;
    for (std::size_t h = 0; h <= 2; ++h) {
      std::size_t size = 1;
      for (std::size_t k = 0; k <= h; ++k) size *= 4;
      const std::vector<double> table = s.vector(size);
      spm.potentials.push_back([table](std::span<const std::uint32_t> c) {
        std::size_t idx = 0;
        for (std::uint32_t x : c) idx = idx * 4 + x;
        return table[idx];
      });
    }
    const LogValue lifted = normalizing_constant(lift_r_range(lift_slice_model(spm)));
    EXPECT_LE(log_gap(lifted, brute_constant(spm)), 1e-12) << seed;
  }
}

TEST(SliceLift, ThreeLetterAlphabet) {
  SlicePotentialModel spm;
  spm.m = 2;
  spm.T = 4;
  spm.f_size = 3;
  spm.r = 1;
  spm.potentials.push_back([](std::span<const std::uint32_t> c) { return 0.1 * (c[0] % 3) - 0.2 * (c[0] / 3); });
  spm.potentials.push_back([](std::span<const std::uint32_t> c) { return c[0] == c[1] ? 0.5 : -0.1 * (c[0] + c[1]) / 8.0; });
  EXPECT_LE(log_gap(normalizing_constant(lift_r_range(lift_slice_model(spm))), brute_constant(spm)), 1e-12);
}

TEST(SliceLift, ShapeErrors) {
  SlicePotentialModel spm = ising_slice_model({2, 3, 0.1, 0.1, 0.1});
  spm.potentials.pop_back();
  EXPECT_THROW(lift_slice_model(spm), invalid_model);
  spm = ising_slice_model({2, 3, 0.1, 0.1, 0.1});
  spm.r = 3;
  EXPECT_THROW(lift_slice_model(spm), invalid_model);
  spm = ising_slice_model({8, 3, 0.1, 0.1, 0.1});
  EXPECT_THROW(lift_slice_model(spm), capacity_exceeded);
}

TEST(LowRank, FullRankIsExact) {
  const SpatialIsingModel sm{4, 30, 0.2, 0.3, 0.4};
  const ApproximateConstant a = spatial_constant_low_rank(sm, 16, 0, 7);
  EXPECT_LT(a.reconstruction_error, 1e-12);
  EXPECT_LE(log_gap(a.constant, spatial_constant(sm)) / spatial_constant(sm).log_magnitude(), 1e-10);
}

TEST(LowRank, ErrorShrinksWithRank) {
  const SpatialIsingModel sm{6, 50, 0.1, 0.2, 0.3};
  double previous = 2.0;
  for (std::size_t k : {2, 8, 32, 64}) {
    const ApproximateConstant a = spatial_constant_low_rank(sm, k, 10, 3);
    EXPECT_LE(a.reconstruction_error, previous + 1e-12) << k;
    previous = a.reconstruction_error;
    EXPECT_TRUE(std::isfinite(a.constant.log_magnitude()));
  }
  EXPECT_LT(previous, 1e-12);
}
