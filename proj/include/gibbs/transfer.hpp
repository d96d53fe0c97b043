#pragma once

// Transfer-matrix recursions for chain-structured Gibbs distributions.
//
// A chain of T sites is written as
//     C = f * M_1 * M_2 * ... * M_{T-1} * b
// with an initial row vector f, nonnegative transfer matrices M_s and a
// terminal column vector b. For a ChainModel, f = b = 1 and M_s = exp(h_s).
// Lifted models (range-r, spatial) produce the same shape with other
// boundary vectors and exact zeros in M_s.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "gibbs/eig.hpp"
#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/marginal_table.hpp"
#include "gibbs/model.hpp"
#include "gibbs/scaled.hpp"
#include "gibbs/step_sequence.hpp"

namespace gibbs {

class TransferChain {
 public:
  TransferChain() = default;

  TransferChain(ScaledVector initial, StepSequence<ScaledNonNegMatrix> steps, ScaledVector terminal)
      : initial_(std::move(initial)), steps_(std::move(steps)), terminal_(std::move(terminal)) {
    if (initial_.orientation() != Orientation::row || terminal_.orientation() != Orientation::column)
      throw dimension_mismatch("transfer chain needs a row initial vector and a column terminal vector");
    std::size_t width = initial_.size();
    for (const auto& m : steps_.distinct()) {
      if (m.rows() != width) throw dimension_mismatch("transfer chain steps do not chain");
      width = m.cols();
    }
    if (steps_.is_repeated() && steps_.body_count() > 1 && !steps_.body().is_square())
      throw dimension_mismatch("repeated transfer step must be square");
    if (terminal_.size() != width) throw dimension_mismatch("terminal vector does not match the last step");
  }

  static TransferChain from_model(const ChainModel& m) {
    const std::size_t n = m.n_states();
    return {ScaledVector::ones(n, Orientation::row),
            m.log_potentials().transform([](const Table& h) { return ScaledNonNegMatrix::from_log_table(h); }),
            ScaledVector::ones(n, Orientation::column)};
  }

  /// Number of sites.
  std::size_t length() const { return steps_.size() + 1; }
  const ScaledVector& initial() const { return initial_; }
  const ScaledVector& terminal() const { return terminal_; }
  const StepSequence<ScaledNonNegMatrix>& steps() const { return steps_; }

  /// M_s for s in 1..T-1.
  const ScaledNonNegMatrix& step(std::size_t s) const { return steps_[s - 1]; }

  /// Alphabet size at site t (1-based).
  std::size_t states_at(std::size_t t) const { return t == 1 ? initial_.size() : step(t - 1).cols(); }

 private:
  ScaledVector initial_;
  StepSequence<ScaledNonNegMatrix> steps_;
  ScaledVector terminal_;
};

enum class ConstantMethod {
  automatic,  // power for homogeneous chains when cheaper, sweep otherwise
  sweep,      // vector sweeps, O(T N^2)
  power,      // repeated squaring of the shared step, O(N^3 log T)
  eig,        // dense eigendecomposition of the shared step
};

/// Sweeping wins when T*N^2 < N^3*log2(T).
inline bool prefer_power(std::uint64_t length, std::size_t n_states) {
  const double t = static_cast<double>(length);
  const double n = static_cast<double>(n_states);
  return !(t * n * n < n * n * n * std::log2(std::max(t, 2.0)));
}

namespace detail {

// b' = M_from * ... * M_{to-1} * b (1-based step indices, from <= to).
inline ScaledVector sweep_backward(const TransferChain& c, std::size_t from, std::size_t to, const ScaledVector& b) {
  VectorSweep v(b);
  for (std::size_t s = to; s-- > from;) v.left_multiply(c.step(s));
  return v.value();
}

inline LogValue constant_sweep(const TransferChain& c) {
  ScaledVector v(c.initial().mantissa(), Orientation::row);
  CompensatedSum log_scale(c.initial().log_scale());
  if (c.initial().is_zero()) return LogValue::zero();
  for (std::size_t s = 1; s < c.length(); ++s) {
    v = scaled_vecmat(v, c.step(s));
    if (v.is_zero()) return LogValue::zero();
    log_scale += v.log_scale();
    v = ScaledVector(v.mantissa(), Orientation::row);
  }
  const LogValue tail = scaled_dot(v, c.terminal());
  if (tail.is_zero()) return tail;
  return LogValue::from_log(log_scale.value() + tail.log_magnitude());
}

// Column vector (last step) * b, or b if there is no distinct last step.
inline ScaledVector repeated_tail(const TransferChain& c) {
  const auto& steps = c.steps();
  return steps.has_distinct_last() ? scaled_matvec(steps.last(), c.terminal()) : c.terminal();
}

inline void require_repeated(const TransferChain& c, const char* what) {
  if (!c.steps().is_repeated() || c.steps().empty())
    throw invalid_argument(std::string(what) + " requires a homogeneous chain");
}

inline LogValue constant_power(const TransferChain& c) {
  require_repeated(c, "the power method");
  const auto& steps = c.steps();
  const ScaledNonNegMatrix p = scaled_matpow(steps.body(), steps.body_count());
  const ScaledNonNegMatrix ms[] = {p};
  return quadratic_form(c.initial(), ms, repeated_tail(c));
}

inline LogValue constant_eig(const TransferChain& c) {
  require_repeated(c, "the eigendecomposition method");
  const auto& steps = c.steps();
  return constant_via_eig(c.initial(), steps.body(), steps.body_count(), repeated_tail(c));
}

}  // namespace detail

inline LogValue normalizing_constant(const TransferChain& c, ConstantMethod method = ConstantMethod::automatic) {
  switch (method) {
    case ConstantMethod::sweep:
      return detail::constant_sweep(c);
    case ConstantMethod::power:
      return detail::constant_power(c);
    case ConstantMethod::eig:
      return detail::constant_eig(c);
    case ConstantMethod::automatic:
      break;
  }
  if (c.steps().is_repeated() && !c.steps().empty() && prefer_power(c.length(), c.steps().body().rows()))
    return detail::constant_power(c);
  return detail::constant_sweep(c);
}

/// C = 1^T (prod_s H_s) 1 with H_s = exp(h_s).
inline LogValue normalizing_constant(const ChainModel& m, ConstantMethod method = ConstantMethod::automatic) {
  return normalizing_constant(TransferChain::from_model(m), method);
}

/// B_1..B_T with B_T = b and B_{t-1} = M_{t-1} B_t.
struct BackwardVectors {
  std::vector<ScaledVector> vectors;
  const ScaledVector& at(std::size_t t) const { return vectors.at(t - 1); }
};

/// F_1..F_T with F_1 = f and F_t = F_{t-1} M_{t-1}.
struct ForwardVectors {
  std::vector<ScaledVector> vectors;
  const ScaledVector& at(std::size_t t) const { return vectors.at(t - 1); }
};

inline BackwardVectors backward_vectors(const TransferChain& c) {
  BackwardVectors out;
  out.vectors.resize(c.length());
  out.vectors.back() = c.terminal();
  VectorSweep v(c.terminal());
  for (std::size_t t = c.length() - 1; t >= 1; --t) {
    v.left_multiply(c.step(t));
    out.vectors[t - 1] = v.value();
  }
  return out;
}

inline ForwardVectors forward_vectors(const TransferChain& c) {
  ForwardVectors out;
  out.vectors.reserve(c.length());
  out.vectors.push_back(c.initial());
  VectorSweep v(c.initial());
  for (std::size_t t = 1; t < c.length(); ++t) {
    v.right_multiply(c.step(t));
    out.vectors.push_back(v.value());
  }
  return out;
}

inline BackwardVectors backward_vectors(const ChainModel& m) { return backward_vectors(TransferChain::from_model(m)); }
inline ForwardVectors forward_vectors(const ChainModel& m) { return forward_vectors(TransferChain::from_model(m)); }

/// B_t alone, without storing the others.
inline ScaledVector backward_vector_at(const TransferChain& c, std::size_t t) {
  if (t < 1 || t > c.length()) throw invalid_argument("site index out of range");
  return detail::sweep_backward(c, t, c.length(), c.terminal());
}

/// F_t alone, without storing the others.
inline ScaledVector forward_vector_at(const TransferChain& c, std::size_t t) {
  if (t < 1 || t > c.length()) throw invalid_argument("site index out of range");
  VectorSweep v(c.initial());
  for (std::size_t s = 1; s < t; ++s) v.right_multiply(c.step(s));
  return v.value();
}

/// pi(z_1..z_t) = C^-1 f(z_1) prod_{s<t} M_s(z_s, z_{s+1}) B_t(z_t).
inline double prefix_marginal(const TransferChain& c, std::size_t t, std::span<const int> prefix) {
  if (t < 1 || t > c.length()) throw invalid_argument("prefix length out of range");
  if (prefix.size() != t) throw invalid_argument("prefix must hold exactly t states");
  for (std::size_t i = 0; i < t; ++i)
    if (prefix[i] < 0 || static_cast<std::size_t>(prefix[i]) >= c.states_at(i + 1)) throw invalid_argument("state out of range");
  const ScaledVector bt = backward_vector_at(c, t);
  const ScaledVector b1 = detail::sweep_backward(c, 1, t, bt);
  const LogValue constant = scaled_dot(c.initial(), b1);
  double log_p = c.initial().log_entry(prefix[0]);
  for (std::size_t s = 1; s < t; ++s) log_p += c.step(s).log_entry(prefix[s - 1], prefix[s]);
  log_p += bt.log_entry(prefix[t - 1]);
  return std::exp(log_p - constant.log_magnitude());
}

inline double prefix_marginal(const ChainModel& m, std::size_t t, std::span<const int> prefix) {
  return prefix_marginal(TransferChain::from_model(m), t, prefix);
}

/// M_from * ... * M_{to-1}; repeated runs use repeated squaring.
inline ScaledNonNegMatrix segment_product(const TransferChain& c, std::size_t from, std::size_t to) {
  const auto& steps = c.steps();
  if (from == to) return ScaledNonNegMatrix::identity(c.states_at(from));
  if (steps.is_repeated()) {
    const std::size_t body_end = std::min(to, steps.body_count() + 1);  // steps [from, body_end) are body
    ScaledNonNegMatrix p = body_end > from ? scaled_matpow(steps.body(), body_end - from)
                                           : ScaledNonNegMatrix::identity(c.states_at(from));
    if (to > body_end) p = scaled_matmul(p, steps.last());
    return p;
  }
  ScaledNonNegMatrix p = c.step(from);
  for (std::size_t s = from + 1; s < to; ++s) p = scaled_matmul(p, c.step(s));
  return p;
}

namespace detail {

inline void check_sites(std::span<const std::size_t> sites, std::size_t length) {
  if (sites.empty()) throw invalid_argument("site subset is empty");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 1 || sites[i] > length) throw invalid_argument("site index out of range");
    if (i > 0 && sites[i] <= sites[i - 1]) throw invalid_argument("sites must be strictly increasing");
  }
}

}  // namespace detail

/// Marginal on S = {s_1 < ... < s_q}:
///   pi_S(z) = C^-1 F_{s_1}(z_1) prod_i G_i(z_i, z_{i+1}) B_{s_q}(z_q)
/// with G_i = M_{s_i} ... M_{s_{i+1}-1}. When s_1 = 1 the left factor is f
/// itself and when s_q = T the right factor is b, which covers all four
/// endpoint cases with one formula.
inline MarginalTable subset_marginal(const TransferChain& c, std::span<const std::size_t> sites,
                                     const Limits& limits = {}) {
  detail::check_sites(sites, c.length());
  MarginalTable table;
  table.sites.assign(sites.begin(), sites.end());
  for (std::size_t s : sites) table.dims.push_back(c.states_at(s));
  const std::size_t entries = detail::checked_table_size(table.dims, limits.max_table_entries);

  const ScaledVector left = forward_vector_at(c, sites.front());
  const ScaledVector right = backward_vector_at(c, sites.back());
  const ScaledVector b_first = detail::sweep_backward(c, sites.front(), sites.back(), right);
  const double log_c = scaled_dot(left, b_first).log_magnitude();

  std::vector<std::vector<double>> seg_logs;
  for (std::size_t i = 0; i + 1 < sites.size(); ++i) {
    const ScaledNonNegMatrix g = segment_product(c, sites[i], sites[i + 1]);
    std::vector<double> logs(g.rows() * g.cols());
    for (std::size_t u = 0; u < g.rows(); ++u)
      for (std::size_t v = 0; v < g.cols(); ++v) logs[u * g.cols() + v] = g.log_entry(u, v);
    seg_logs.push_back(std::move(logs));
  }

  table.probs.resize(entries);
  for (std::size_t idx = 0; idx < entries; ++idx) {
    const std::vector<int> z = table.config(idx);
    double lp = left.log_entry(z.front()) + right.log_entry(z.back()) - log_c;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) lp += seg_logs[i][z[i] * table.dims[i + 1] + z[i + 1]];
    table.probs[idx] = std::exp(lp);
  }
  return table;
}

inline MarginalTable subset_marginal(const ChainModel& m, std::span<const std::size_t> sites, const Limits& limits = {}) {
  return subset_marginal(TransferChain::from_model(m), sites, limits);
}

/// Lifts a range-r model to a chain on y_s = (z_s, ..., z_{s+r}), s = 1..T-r:
///   f(y_1) = H_1(y_1), M_s(y, y') = 1[y' continues y] * H_{s+1}(y'), b = 1,
/// so each factor is counted exactly once. Shift-violating entries are exact
/// zeros.
inline TransferChain lift_r_range(const RRangeModel& m, const Limits& limits = {}) {
  const std::size_t n = m.n_states();
  const std::size_t k = m.tuple_count();
  if (k > limits.max_states) throw capacity_exceeded("lifted alphabet N^(r+1) exceeds the configured cap");
  const std::size_t suffix_count = k / n;  // N^r

  auto to_matrix = [&](const std::vector<double>& h) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : h) mx = std::max(mx, x);
    std::vector<double> mant(k * k, 0.0);
    for (std::size_t y = 0; y < k; ++y) {
      const std::size_t shifted = (y % suffix_count) * n;
      for (std::size_t x = 0; x < n; ++x) mant[y * k + shifted + x] = std::exp(h[shifted + x] - mx);
    }
    return ScaledNonNegMatrix(k, k, std::move(mant), mx);
  };

  const auto& factors = m.factors();
  const std::size_t lifted_length = factors.size();
  ScaledVector initial = ScaledVector::from_logs(factors[0], Orientation::row);
  StepSequence<ScaledNonNegMatrix> steps;
  if (factors.is_repeated()) {
    std::optional<ScaledNonNegMatrix> last;
    if (factors.has_distinct_last() && lifted_length >= 2) last = to_matrix(factors.last());
    steps = StepSequence<ScaledNonNegMatrix>::repeated(to_matrix(factors.body()), lifted_length - 1, std::move(last));
  } else {
    std::vector<ScaledNonNegMatrix> list;
    for (std::size_t s = 1; s < lifted_length; ++s) list.push_back(to_matrix(factors[s]));
    steps = StepSequence<ScaledNonNegMatrix>::from_list(std::move(list));
  }
  return {std::move(initial), std::move(steps), ScaledVector::ones(k, Orientation::column)};
}

/// Marginal of a range-r model on original sites, through the lifted chain.
/// Site s lives in lifted position min(s, T-r) at coordinate s - position.
inline MarginalTable r_range_subset_marginal(const RRangeModel& m, std::span<const std::size_t> sites,
                                             const Limits& limits = {}) {
  detail::check_sites(sites, m.length());
  const std::size_t n = m.n_states();
  const std::size_t r = m.range();
  const std::size_t last_position = m.length() - r;

  std::vector<std::size_t> positions;
  for (std::size_t s : sites) {
    const std::size_t p = std::min(s, last_position);
    if (positions.empty() || positions.back() != p) positions.push_back(p);
  }
  const MarginalTable lifted = subset_marginal(lift_r_range(m, limits), positions, limits);

  MarginalTable out;
  out.sites.assign(sites.begin(), sites.end());
  out.dims.assign(sites.size(), n);
  out.probs.assign(detail::checked_table_size(out.dims, limits.max_table_entries), 0.0);

  std::vector<std::size_t> slot(sites.size());  // index into positions
  std::vector<std::size_t> divisor(sites.size());
  for (std::size_t i = 0, j = 0; i < sites.size(); ++i) {
    const std::size_t p = std::min(sites[i], last_position);
    while (positions[j] != p) ++j;
    slot[i] = j;
    std::size_t d = 1;
    for (std::size_t e = 0; e < r - (sites[i] - p); ++e) d *= n;
    divisor[i] = d;
  }
  for (std::size_t idx = 0; idx < lifted.probs.size(); ++idx) {
    const std::vector<int> y = lifted.config(idx);
    std::size_t o = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) o = o * n + (static_cast<std::size_t>(y[slot[i]]) / divisor[i]) % n;
    out.probs[o] += lifted.probs[idx];
  }
  return out;
}

}  // namespace gibbs
