#pragma once

// Chain Gibbs models in two conventions:
//  * ChainModel: saturated pair log-potentials h_1..h_{T-1}, energy
//    U(z) = sum_s h_s(z_s, z_{s+1}).
//  * SingletonPairModel: singletons theta_1..theta_T and pairs
//    psi_1..psi_{T-1} (psi_T is identically zero and not stored).
// to_chain_form is the only bridge between them. States are 0..N-1; rows of a
// pair table index the current state, columns the next one.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/step_sequence.hpp"
#include "gibbs/table.hpp"

namespace gibbs {

namespace detail {

inline void check_configuration(std::span<const int> z, std::size_t length, std::size_t n_states) {
  if (z.size() != length) throw invalid_argument("configuration length does not match the model length");
  for (int s : z)
    if (s < 0 || static_cast<std::size_t>(s) >= n_states) throw invalid_argument("state out of range");
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

class ChainModel {
 public:
  ChainModel() = default;

  ChainModel(std::size_t n_states, std::size_t length, StepSequence<Table> log_potentials,
             std::vector<std::string> state_labels = {})
      : n_(n_states), length_(length), h_(std::move(log_potentials)), labels_(std::move(state_labels)) {
    if (length_ < 2) throw invalid_model("chain length T must be at least 2");
    if (n_ < 2) throw invalid_model("chain needs at least 2 states");
    if (h_.size() != length_ - 1) throw invalid_model("chain needs exactly T-1 potential tables");
    for (const Table& t : h_.distinct()) {
      if (t.rows() != n_ || t.cols() != n_) throw invalid_model("potential table is not N x N");
      if (!t.all_finite()) throw invalid_model("non-finite entry");
    }
    if (!labels_.empty() && labels_.size() != n_) throw invalid_model("state_labels must have N entries");
  }

  /// All T-1 steps share one table.
  static ChainModel homogeneous(std::size_t n_states, std::size_t length, Table h) {
    return {n_states, length, StepSequence<Table>::repeated(std::move(h), length - 1)};
  }

  std::size_t n_states() const { return n_; }
  std::size_t length() const { return length_; }
  const StepSequence<Table>& log_potentials() const { return h_; }
  const std::vector<std::string>& state_labels() const { return labels_; }

  /// h_s for s in 1..T-1.
  const Table& h(std::size_t s) const { return h_[s - 1]; }

  std::string label(std::size_t state) const { return labels_.empty() ? std::to_string(state) : labels_[state]; }

 private:
  std::size_t n_ = 0;
  std::size_t length_ = 0;
  StepSequence<Table> h_;
  std::vector<std::string> labels_;
};

class SingletonPairModel {
 public:
  SingletonPairModel() = default;

  SingletonPairModel(std::size_t n_states, std::size_t length, StepSequence<std::vector<double>> singletons,
                     StepSequence<Table> pairs)
      : n_(n_states), length_(length), theta_(std::move(singletons)), psi_(std::move(pairs)) {
    if (length_ < 2) throw invalid_model("chain length T must be at least 2");
    if (n_ < 2) throw invalid_model("chain needs at least 2 states");
    if (theta_.size() != length_) throw invalid_model("singleton_pair model needs T singleton vectors");
    if (psi_.size() != length_ - 1) throw invalid_model("singleton_pair model needs T-1 pair tables");
    for (const auto& t : theta_.distinct()) {
      if (t.size() != n_) throw invalid_model("singleton vector does not have N entries");
      if (!detail::all_finite(t)) throw invalid_model("non-finite entry");
    }
    for (const Table& t : psi_.distinct()) {
      if (t.rows() != n_ || t.cols() != n_) throw invalid_model("pair table is not N x N");
      if (!t.all_finite()) throw invalid_model("non-finite entry");
    }
  }

  std::size_t n_states() const { return n_; }
  std::size_t length() const { return length_; }
  const StepSequence<std::vector<double>>& singletons() const { return theta_; }
  const StepSequence<Table>& pairs() const { return psi_; }

  /// theta_s(u), s in 1..T.
  double theta(std::size_t s, std::size_t u) const { return theta_[s - 1][u]; }
  /// psi_s(u, v), s in 1..T; psi_T is zero.
  double psi(std::size_t s, std::size_t u, std::size_t v) const { return s == length_ ? 0.0 : psi_[s - 1](u, v); }

 private:
  std::size_t n_ = 0;
  std::size_t length_ = 0;
  StepSequence<std::vector<double>> theta_;
  StepSequence<Table> psi_;
};

/// Range-r factorizable model: T-r log factors h_s over (z_s, ..., z_{s+r}),
/// each a flat table of N^(r+1) entries in lexicographic tuple order (first
/// coordinate most significant).
class RRangeModel {
 public:
  RRangeModel() = default;

  RRangeModel(std::size_t n_states, std::size_t length, std::size_t range, StepSequence<std::vector<double>> factors)
      : n_(n_states), length_(length), range_(range), factors_(std::move(factors)) {
    if (range_ < 1) throw invalid_model("range must be at least 1");
    if (length_ <= range_) throw invalid_model("r_range model needs T > r");
    if (n_ < 2) throw invalid_model("model needs at least 2 states");
    if (factors_.size() != length_ - range_) throw invalid_model("r_range model needs T-r factor tables");
    std::size_t tuples = 1;
    for (std::size_t i = 0; i <= range_; ++i) tuples *= n_;
    for (const auto& f : factors_.distinct()) {
      if (f.size() != tuples) throw invalid_model("factor table does not have N^(r+1) entries");
      if (!detail::all_finite(f)) throw invalid_model("non-finite entry");
    }
    tuple_count_ = tuples;
  }

  std::size_t n_states() const { return n_; }
  std::size_t length() const { return length_; }
  std::size_t range() const { return range_; }
  std::size_t tuple_count() const { return tuple_count_; }
  const StepSequence<std::vector<double>>& factors() const { return factors_; }

  /// Log factor h_s at the window starting at site s (1-based).
  double factor(std::size_t s, std::span<const int> window) const {
    std::size_t idx = 0;
    for (int x : window) idx = idx * n_ + static_cast<std::size_t>(x);
    return factors_[s - 1][idx];
  }

 private:
  std::size_t n_ = 0;
  std::size_t length_ = 0;
  std::size_t range_ = 0;
  std::size_t tuple_count_ = 0;
  StepSequence<std::vector<double>> factors_;
};

/// U(z) = h_1(z_1, z_2) + ... + h_{T-1}(z_{T-1}, z_T), summed left to right.
inline double energy(const ChainModel& m, std::span<const int> z) {
  detail::check_configuration(z, m.length(), m.n_states());
  double u = 0.0;
  for (std::size_t s = 1; s < m.length(); ++s) u += m.h(s)(z[s - 1], z[s]);
  return u;
}

namespace detail {

// The chain-form entry h_s(u, v). Shared by energy() and to_chain_form() so
// both use one summation order.
inline double chain_term(const SingletonPairModel& m, std::size_t s, std::size_t u, std::size_t v) {
  double x = m.theta(s, u) + m.psi(s, u, v);
  if (s + 1 == m.length()) x += m.theta(s + 1, v);
  return x;
}

}  // namespace detail

/// Energy of a singleton_pair model. Accumulated left to right over s as
/// sum_s [theta_s(z_s) + psi_s(z_s, z_{s+1})] with theta_T added inside the
/// last term, so it equals energy(to_chain_form(m), z) bit for bit.
inline double energy(const SingletonPairModel& m, std::span<const int> z) {
  detail::check_configuration(z, m.length(), m.n_states());
  double u = 0.0;
  for (std::size_t s = 1; s < m.length(); ++s)
    u += detail::chain_term(m, s, static_cast<std::size_t>(z[s - 1]), static_cast<std::size_t>(z[s]));
  return u;
}

inline double energy(const RRangeModel& m, std::span<const int> z) {
  detail::check_configuration(z, m.length(), m.n_states());
  double u = 0.0;
  for (std::size_t s = 1; s + m.range() <= m.length(); ++s) u += m.factor(s, z.subspan(s - 1, m.range() + 1));
  return u;
}

inline LogValue unnormalized_density(const ChainModel& m, std::span<const int> z) {
  return LogValue::from_log(energy(m, z));
}

/// Folds singletons into pair tables: h_s(u,v) = theta_s(u) + psi_s(u,v) for
/// s <= T-2 and h_{T-1}(u,v) = theta_{T-1}(u) + psi_{T-1}(u,v) + theta_T(v).
inline ChainModel to_chain_form(const SingletonPairModel& m) {
  const std::size_t n = m.n_states();
  const std::size_t t = m.length();
  auto build = [&](std::size_t s) {
    Table h(n, n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) h(u, v) = detail::chain_term(m, s, u, v);
    return h;
  };
  const bool repeated = m.singletons().is_repeated() && m.pairs().is_repeated();
  if (repeated && t > 2) {
    // Steps 1..T-2 all read the body tables.
    return {n, t, StepSequence<Table>::repeated(build(1), t - 1, build(t - 1))};
  }
  std::vector<Table> list;
  list.reserve(t - 1);
  for (std::size_t s = 1; s < t; ++s) list.push_back(build(s));
  return {n, t, StepSequence<Table>::from_list(std::move(list))};
}

/// The trivial embedding theta = 0, psi_s = h_s.
inline SingletonPairModel from_chain_form(const ChainModel& m) {
  return {m.n_states(), m.length(), StepSequence<std::vector<double>>::repeated(std::vector<double>(m.n_states(), 0.0), m.length()),
          m.log_potentials()};
}

}  // namespace gibbs
