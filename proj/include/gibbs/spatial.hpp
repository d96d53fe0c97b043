#pragma once

// m x T Ising lattices seen as a length-T chain whose states are whole
// columns. A column is an m-bit mask, bit i set <=> spin +1 at row i.
//
// Column t contributes alpha * sum_i z(t,i) + beta * sum_i z(t,i) z(t,i+1),
// and adjacent columns contribute delta * sum_i z(t,i) z(t+1,i). In terms of
// counting statistics the transfer matrices are
//     H_t(u, v) = g(u) * exp{delta(t) (n+(u,v) - n-(u,v))},
//     g(u)      = exp{alpha (n+(u) - n-(u)) + beta (v+(u) - v-(u))},
// with delta(t) = delta for t <= T-1 and 0 for t = T, and
//     C = 1^T H_1 ... H_{T-1} g.
// The coupling factor is a Kronecker power of the 2x2 matrix
// [[e^d, e^-d], [e^-d, e^d]], which the default sweep exploits.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/marginal_table.hpp"
#include "gibbs/model.hpp"
#include "gibbs/randomized.hpp"
#include "gibbs/scaled.hpp"
#include "gibbs/transfer.hpp"

namespace gibbs {

struct SpatialIsingModel {
  std::size_t m = 1;  // rows (column height)
  std::size_t T = 2;  // columns
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;

  void validate() const {
    if (m < 1) throw invalid_model("spatial model needs m >= 1");
    if (T < 2) throw invalid_model("spatial model needs T >= 2");
    if (m > 30) throw invalid_model("spatial model supports m <= 30");
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(delta)) throw invalid_model("non-finite entry");
  }

  std::size_t column_states() const { return std::size_t{1} << m; }

  friend bool operator==(const SpatialIsingModel&, const SpatialIsingModel&) = default;
};

struct SliceStatistics {
  int n_plus = 0;
  int n_minus = 0;
  int v_plus = 0;
  int v_minus = 0;
  int n_agree = 0;
  int n_disagree = 0;
};

inline SliceStatistics slice_statistics(std::uint32_t c, std::uint32_t d, std::size_t m) {
  const std::uint32_t mask = m >= 32 ? ~0u : (1u << m) - 1u;
  const std::uint32_t vmask = m <= 1 ? 0u : (1u << (m - 1)) - 1u;
  const int mi = static_cast<int>(m);
  SliceStatistics s;
  s.n_plus = std::popcount(c & mask);
  s.n_minus = mi - s.n_plus;
  s.v_plus = std::popcount(~(c ^ (c >> 1)) & vmask);
  s.v_minus = (mi - 1) - s.v_plus;
  s.n_agree = mi - std::popcount((c ^ d) & mask);
  s.n_disagree = mi - s.n_agree;
  return s;
}

/// log g(u): the within-column part of the energy.
inline double column_log_weight(const SpatialIsingModel& sm, std::uint32_t u) {
  const SliceStatistics s = slice_statistics(u, u, sm.m);
  return sm.alpha * (s.n_plus - s.n_minus) + sm.beta * (s.v_plus - s.v_minus);
}

/// g as a scaled column vector.
inline ScaledVector column_weights(const SpatialIsingModel& sm) {
  std::vector<double> logs(sm.column_states());
  for (std::size_t u = 0; u < logs.size(); ++u) logs[u] = column_log_weight(sm, static_cast<std::uint32_t>(u));
  return ScaledVector::from_logs(logs, Orientation::column);
}

/// Dense 2^m x 2^m matrix H_t, t in 1..T. Needs 2^m <= limits.max_states.
inline ScaledNonNegMatrix build_spatial_transfer(const SpatialIsingModel& sm, std::size_t t, const Limits& limits = {}) {
  sm.validate();
  if (t < 1 || t > sm.T) throw invalid_argument("column index out of range");
  const std::size_t n = sm.column_states();
  if (n > limits.max_states) throw capacity_exceeded("2^m exceeds the dense matrix cap");
  const double d = t <= sm.T - 1 ? sm.delta : 0.0;

  // Row factors need 2^m exp calls, the coupling only m + 1.
  std::vector<double> row_log(n);
  double row_max = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < n; ++u) {
    row_log[u] = column_log_weight(sm, static_cast<std::uint32_t>(u));
    row_max = std::max(row_max, row_log[u]);
  }
  std::vector<double> row(n);
  for (std::size_t u = 0; u < n; ++u) row[u] = std::exp(row_log[u] - row_max);
  const double couple_max = std::abs(d) * static_cast<double>(sm.m);
  std::vector<double> couple(sm.m + 1);
  for (std::size_t a = 0; a <= sm.m; ++a)
    couple[a] = std::exp(d * (2.0 * static_cast<double>(a) - static_cast<double>(sm.m)) - couple_max);

  std::vector<double> mant(n * n);
  const std::uint32_t mask = static_cast<std::uint32_t>(n - 1);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      const auto agree = static_cast<std::size_t>(sm.m) - std::popcount(static_cast<std::uint32_t>(u ^ v) & mask);
      mant[u * n + v] = row[u] * couple[agree];
    }
  return {n, n, std::move(mant), row_max + couple_max};
}

/// The lattice as a transfer chain over columns: f = 1, M_t = H_t
/// (t = 1..T-1, all equal), b = g.
inline TransferChain spatial_transfer_chain(const SpatialIsingModel& sm, const Limits& limits = {}) {
  const std::size_t n = sm.column_states();
  return {ScaledVector::ones(n, Orientation::row),
          StepSequence<ScaledNonNegMatrix>::repeated(build_spatial_transfer(sm, 1, limits), sm.T - 1),
          column_weights(sm)};
}

namespace detail {

// x <- K^{(x)m} x in place, K = [[e^d, e^-d], [e^-d, e^d]] / e^|d|.
inline void apply_coupling(std::vector<double>& x, std::size_t m, double d) {
  const double same = std::exp(d - std::abs(d));
  const double diff = std::exp(-d - std::abs(d));
  for (std::size_t bit = 0; bit < m; ++bit) {
    const std::size_t step = std::size_t{1} << bit;
    for (std::size_t base = 0; base < x.size(); base += 2 * step)
      for (std::size_t i = base; i < base + step; ++i) {
        const double lo = x[i], hi = x[i + step];
        x[i] = same * lo + diff * hi;
        x[i + step] = diff * lo + same * hi;
      }
  }
}

}  // namespace detail

enum class SweepDirection { right_to_left, left_to_right };

/// Spatial constant by Kronecker-factored sweeps: O(T m 2^m) time and
/// O(2^m) memory. Needs 2^m <= limits.max_column_states.
inline LogValue spatial_constant(const SpatialIsingModel& sm, SweepDirection dir = SweepDirection::right_to_left,
                                 const Limits& limits = {}) {
  sm.validate();
  const std::size_t n = sm.column_states();
  if (n > limits.max_column_states) throw capacity_exceeded("2^m exceeds the configured column-state cap");
  const ScaledVector g = column_weights(sm);
  const double per_step = std::abs(sm.delta) * static_cast<double>(sm.m) + g.log_scale();

  CompensatedSum log_scale;
  std::vector<double> x;
  auto renormalize = [&] {
    const double s = detail::renormalize(x);
    log_scale += s;
  };
  if (dir == SweepDirection::right_to_left) {
    // w <- H w = g o (K w), starting from w = g.
    x = g.mantissa();
    log_scale += g.log_scale();
    for (std::size_t t = 1; t < sm.T; ++t) {
      detail::apply_coupling(x, sm.m, sm.delta);
      for (std::size_t u = 0; u < n; ++u) x[u] *= g.mantissa(u);
      log_scale += per_step;
      renormalize();
    }
    double s = 0.0;
    for (double v : x) s += v;
    return LogValue::from_log(log_scale.value() + std::log(s));
  }
  // w <- w H = (w o g) K (K is symmetric), starting from w = 1.
  x.assign(n, 1.0);
  for (std::size_t t = 1; t < sm.T; ++t) {
    for (std::size_t u = 0; u < n; ++u) x[u] *= g.mantissa(u);
    detail::apply_coupling(x, sm.m, sm.delta);
    log_scale += per_step;
    renormalize();
  }
  double s = 0.0;
  for (std::size_t u = 0; u < n; ++u) s += x[u] * g.mantissa(u);
  return LogValue::from_log(log_scale.value() + g.log_scale() + std::log(s));
}

/// Spatial constant through the dense transfer chain (sweep, power or eig).
inline LogValue spatial_constant_dense(const SpatialIsingModel& sm, ConstantMethod method, const Limits& limits = {}) {
  return normalizing_constant(spatial_transfer_chain(sm, limits), method);
}

struct ApproximateConstant {
  LogValue constant;
  double reconstruction_error = 0.0;  // relative Frobenius error of the factored H
  std::size_t rank = 0;
};

/// Replaces the interior H by a randomized rank-k factorization.
inline ApproximateConstant spatial_constant_low_rank(const SpatialIsingModel& sm, std::size_t rank,
                                                     std::size_t oversampling, std::uint64_t seed,
                                                     const Limits& limits = {}) {
  const ScaledNonNegMatrix h = build_spatial_transfer(sm, 1, limits);
  const std::size_t n = h.rows();
  const std::size_t over = std::min(oversampling, n - std::min(rank, n));
  const LowRankFactors f = randomized_factorize(h, rank, over, seed, 1);
  ApproximateConstant out;
  out.rank = rank;
  out.reconstruction_error = relative_reconstruction_error(h, f);
  out.constant = low_rank_chain_constant(ScaledVector::ones(n, Orientation::row), f, sm.T - 1, column_weights(sm));
  return out;
}

/// Marginal law of whole columns on a column subset.
inline MarginalTable spatial_subset_marginal(const SpatialIsingModel& sm, std::span<const std::size_t> columns,
                                             const Limits& limits = {}) {
  return subset_marginal(spatial_transfer_chain(sm, limits), columns, limits);
}

/// Probability of one column configuration on a column subset.
inline double spatial_subset_marginal(const SpatialIsingModel& sm, std::span<const std::size_t> columns,
                                      std::span<const int> column_states, const Limits& limits = {}) {
  return spatial_subset_marginal(sm, columns, limits).at(column_states);
}

/// Slice potentials Psi_h(z_{t-h}, ..., z_t), h = 0..r, over columns in
/// F^m. A column is a base-|F| integer, row i being digit i (least
/// significant first). The energy is
///     U(z) = sum_{h=0..r} sum_{t=h+1..T} Psi_h(z_{t-h}, ..., z_t).
struct SlicePotentialModel {
  using Potential = std::function<double(std::span<const std::uint32_t>)>;

  std::size_t m = 1;
  std::size_t T = 2;
  std::size_t f_size = 2;
  std::size_t r = 1;
  std::vector<Potential> potentials;  // r + 1 entries

  std::size_t column_states() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < m; ++i) n *= f_size;
    return n;
  }
};

inline double energy(const SlicePotentialModel& spm, std::span<const std::uint32_t> columns) {
  double u = 0.0;
  for (std::size_t h = 0; h <= spm.r; ++h)
    for (std::size_t t = h + 1; t <= spm.T; ++t) u += spm.potentials[h](columns.subspan(t - 1 - h, h + 1));
  return u;
}

/// Regroups the slice energy into range-r factors over (r+1)-column
/// windows. The term of height h starting at column p goes to the window
/// starting at min(p, T-r), so every term is counted once.
inline RRangeModel lift_slice_model(const SlicePotentialModel& spm, const Limits& limits = {}) {
  if (spm.r < 1) throw invalid_model("slice model needs r >= 1");
  if (spm.r >= spm.T) throw invalid_model("slice model needs r < T");
  if (spm.potentials.size() != spm.r + 1) throw invalid_model("slice model needs r + 1 potentials");
  const std::size_t n = spm.column_states();
  std::size_t windows = 1;
  for (std::size_t i = 0; i <= spm.r; ++i) {
    if (windows > limits.max_states / n) throw capacity_exceeded("lifted slice alphabet exceeds the configured cap");
    windows *= n;
  }

  auto build = [&](bool last) {
    std::vector<double> f(windows);
    std::vector<std::uint32_t> cols(spm.r + 1);
    for (std::size_t idx = 0; idx < windows; ++idx) {
      std::size_t rest = idx;
      for (std::size_t k = spm.r + 1; k-- > 0;) {
        cols[k] = static_cast<std::uint32_t>(rest % n);
        rest /= n;
      }
      const std::span<const std::uint32_t> w(cols);
      double x = 0.0;
      for (std::size_t h = 0; h <= spm.r; ++h) {
        // Offsets of the terms of height h owned by this window.
        const std::size_t last_offset = last ? spm.r - h : 0;
        for (std::size_t o = 0; o <= last_offset; ++o) x += spm.potentials[h](w.subspan(o, h + 1));
      }
      f[idx] = x;
    }
    return f;
  };

  const std::size_t count = spm.T - spm.r;
  std::vector<double> last = build(true);
  if (count == 1) return {n, spm.T, spm.r, StepSequence<std::vector<double>>::repeated(std::move(last), 1)};
  return {n, spm.T, spm.r, StepSequence<std::vector<double>>::repeated(build(false), count, std::move(last))};
}

/// The lattice Ising model as slice potentials (r = 1).
inline SlicePotentialModel ising_slice_model(const SpatialIsingModel& sm) {
  SlicePotentialModel spm;
  spm.m = sm.m;
  spm.T = sm.T;
  spm.f_size = 2;
  spm.r = 1;
  spm.potentials.push_back([sm](std::span<const std::uint32_t> c) { return column_log_weight(sm, c[0]); });
  spm.potentials.push_back([sm](std::span<const std::uint32_t> c) {
    const SliceStatistics s = slice_statistics(c[0], c[1], sm.m);
    return sm.delta * (s.n_agree - s.n_disagree);
  });
  return spm;
}

}  // namespace gibbs
