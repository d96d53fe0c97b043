#pragma once

// Exhaustive summation over all configurations. Slow by design; every
// faster path in the library is tested against these functions.
//
// Configurations are visited in lexicographic order (site 1 most
// significant) and summed with a streaming log-sum-exp, so results are
// reproducible and safe far beyond double range.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/future.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/marginal_table.hpp"
#include "gibbs/model.hpp"
#include "gibbs/spatial.hpp"

namespace gibbs {

struct EnumerationBudget {
  std::uint64_t max_configs = std::uint64_t{1} << 24;
};

namespace detail {

inline std::uint64_t checked_config_count(std::size_t n_states, std::size_t length, const EnumerationBudget& budget) {
  std::uint64_t count = 1;
  for (std::size_t t = 0; t < length; ++t) {
    if (count > budget.max_configs / n_states) throw capacity_exceeded("enumeration budget exceeded");
    count *= n_states;
  }
  if (count > budget.max_configs) throw capacity_exceeded("enumeration budget exceeded");
  return count;
}

// Calls visit(z) for every z in {0..n-1}^length, lexicographically.
template <class Visit>
void enumerate(std::size_t n_states, std::size_t length, const EnumerationBudget& budget, Visit&& visit) {
  checked_config_count(n_states, length, budget);
  std::vector<int> z(length, 0);
  const int top = static_cast<int>(n_states) - 1;
  while (true) {
    visit(std::span<const int>(z));
    std::size_t i = length;
    while (i > 0 && z[i - 1] == top) z[--i] = 0;
    if (i == 0) return;
    ++z[i - 1];
  }
}

template <class Model>
MarginalTable brute_table(const Model& m, std::span<const std::size_t> sites, const EnumerationBudget& budget) {
  check_sites(sites, m.length());
  MarginalTable out;
  out.sites.assign(sites.begin(), sites.end());
  out.dims.assign(sites.size(), m.n_states());
  std::vector<LogSumAccumulator> acc(checked_table_size(out.dims, budget.max_configs));
  LogSumAccumulator total;
  enumerate(m.n_states(), m.length(), budget, [&](std::span<const int> z) {
    const double u = energy(m, z);
    std::size_t idx = 0;
    for (std::size_t s : sites) idx = idx * m.n_states() + static_cast<std::size_t>(z[s - 1]);
    acc[idx].add_log(u);
    total.add_log(u);
  });
  const double lc = total.value().log_magnitude();
  out.probs.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out.probs[i] = (acc[i].value() / LogValue::from_log(lc)).to_double();
  return out;
}

}  // namespace detail

/// Sum of exp U(z) over all configurations.
template <class Model>
LogValue brute_constant(const Model& m, const EnumerationBudget& budget = {}) {
  LogSumAccumulator acc;
  detail::enumerate(m.n_states(), m.length(), budget, [&](std::span<const int> z) { acc.add_log(energy(m, z)); });
  return acc.value();
}

/// Marginal table of the sites (1-based, increasing).
template <class Model>
MarginalTable brute_marginal_table(const Model& m, std::span<const std::size_t> sites,
                                   const EnumerationBudget& budget = {}) {
  return detail::brute_table(m, sites, budget);
}

/// P(z_S = values).
template <class Model>
double brute_marginal(const Model& m, std::span<const std::size_t> sites, std::span<const int> values,
                      const EnumerationBudget& budget = {}) {
  if (values.size() != sites.size()) throw invalid_argument("configuration does not match the sites");
  detail::check_sites(sites, m.length());
  for (int v : values)
    if (v < 0 || static_cast<std::size_t>(v) >= m.n_states()) throw invalid_argument("state out of range");
  LogSumAccumulator hit, total;
  detail::enumerate(m.n_states(), m.length(), budget, [&](std::span<const int> z) {
    const double u = energy(m, z);
    total.add_log(u);
    for (std::size_t i = 0; i < sites.size(); ++i)
      if (z[sites[i] - 1] != values[i]) return;
    hit.add_log(u);
  });
  return (hit.value() / total.value()).to_double();
}

/// Law of z_t given every other coordinate of z (z[t-1] is ignored).
template <class Model>
std::vector<double> brute_conditional(const Model& m, std::size_t t, std::span<const int> z) {
  if (t < 1 || t > m.length()) throw invalid_argument("site out of range");
  detail::check_configuration(z, m.length(), m.n_states());
  std::vector<int> w(z.begin(), z.end());
  std::vector<double> logs(m.n_states());
  LogSumAccumulator acc;
  for (std::size_t a = 0; a < m.n_states(); ++a) {
    w[t - 1] = static_cast<int>(a);
    logs[a] = energy(m, std::span<const int>(w));
    acc.add_log(logs[a]);
  }
  const double lc = acc.value().log_magnitude();
  for (double& l : logs) l = std::exp(l - lc);
  return logs;
}

// Lattice fields. A field is a vector of m*T states in {0, 1} (1 is spin +1)
// with z[(t-1)*m + i] at row i of column t.

/// Site-by-site lattice energy.
inline double lattice_energy(const SpatialIsingModel& sm, std::span<const int> z) {
  if (z.size() != sm.m * sm.T) throw dimension_mismatch("field size must be m * T");
  auto spin = [&](std::size_t t, std::size_t i) { return z[(t - 1) * sm.m + i] ? 1.0 : -1.0; };
  double u = 0.0;
  for (std::size_t t = 1; t <= sm.T; ++t)
    for (std::size_t i = 0; i < sm.m; ++i) {
      u += sm.alpha * spin(t, i);
      if (i + 1 < sm.m) u += sm.beta * spin(t, i) * spin(t, i + 1);
      if (t < sm.T) u += sm.delta * spin(t, i) * spin(t + 1, i);
    }
  return u;
}

inline LogValue brute_constant(const SpatialIsingModel& sm, const EnumerationBudget& budget = {}) {
  sm.validate();
  LogSumAccumulator acc;
  detail::enumerate(2, sm.m * sm.T, budget, [&](std::span<const int> z) { acc.add_log(lattice_energy(sm, z)); });
  return acc.value();
}

/// Law of whole columns on a column subset. Column states use bit i for
/// row i, matching the spatial module.
inline MarginalTable brute_column_marginal_table(const SpatialIsingModel& sm, std::span<const std::size_t> columns,
                                                 const EnumerationBudget& budget = {}) {
  sm.validate();
  detail::check_sites(columns, sm.T);
  MarginalTable out;
  out.sites.assign(columns.begin(), columns.end());
  out.dims.assign(columns.size(), sm.column_states());
  std::vector<LogSumAccumulator> acc(detail::checked_table_size(out.dims, budget.max_configs));
  LogSumAccumulator total;
  detail::enumerate(2, sm.m * sm.T, budget, [&](std::span<const int> z) {
    const double u = lattice_energy(sm, z);
    std::size_t idx = 0;
    for (std::size_t c : columns) {
      std::size_t col = 0;
      for (std::size_t i = 0; i < sm.m; ++i) col |= static_cast<std::size_t>(z[(c - 1) * sm.m + i]) << i;
      idx = idx * sm.column_states() + col;
    }
    acc[idx].add_log(u);
    total.add_log(u);
  });
  out.probs.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out.probs[i] = (acc[i].value() / total.value()).to_double();
  return out;
}

/// Slice-potential model summed over all column sequences.
inline LogValue brute_constant(const SlicePotentialModel& spm, const EnumerationBudget& budget = {}) {
  LogSumAccumulator acc;
  std::vector<std::uint32_t> cols(spm.T);
  detail::enumerate(spm.column_states(), spm.T, budget, [&](std::span<const int> z) {
    for (std::size_t t = 0; t < spm.T; ++t) cols[t] = static_cast<std::uint32_t>(z[t]);
    acc.add_log(energy(spm, cols));
  });
  return acc.value();
}

}  // namespace gibbs
