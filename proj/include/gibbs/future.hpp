#pragma once

// Marginals by conditioning on the future.
//
// For a singleton/pair model define H_t(u, v) = exp{theta_t(u) + psi_t(u, v)}
// for t = 1..T (psi_T = 0, so H_T has constant rows). The contribution
// vector of a prefix is
//     Gamma_t(z_1..z_t)(u) = exp{U_t(z_1..z_t) + psi_t(z_t, u)},
// updated by Gamma_t(u) = Gamma_{t-1}(z_t) * H_t(z_t, u). With D_T = e_0 and
// D_{t-1} = H_t D_t,
//     pi(z_1..z_t) = Gamma_t(z_1..z_t) . D_t / C.
// D_T only selects one component: Gamma_T is a constant vector (every entry
// equals exp U_T(z)), so any unit vector would do.
//
// The normalizing constant follows from the t = 1 case summed over z_1:
//     C = 1^T H_1 H_2 ... H_T D_T.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/marginal_table.hpp"
#include "gibbs/model.hpp"
#include "gibbs/scaled.hpp"

namespace gibbs {

struct GammaVector {
  ScaledVector values;  // row, length N
  std::size_t t = 0;    // prefix length it conditions on
};

/// H_t(u, v) = exp{theta_t(u) + psi_t(u, v)}, t in 1..T.
inline ScaledNonNegMatrix future_transfer(const SingletonPairModel& m, std::size_t t) {
  const std::size_t n = m.n_states();
  Table h(n, n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) h(u, v) = m.theta(t, u) + m.psi(t, u, v);
  return ScaledNonNegMatrix::from_log_table(h);
}

inline GammaVector gamma_init(const SingletonPairModel& m, int z1) {
  const std::size_t n = m.n_states();
  if (z1 < 0 || static_cast<std::size_t>(z1) >= n) throw invalid_argument("state out of range");
  std::vector<double> logs(n);
  for (std::size_t u = 0; u < n; ++u) logs[u] = m.theta(1, z1) + m.psi(1, z1, u);
  return {ScaledVector::from_logs(logs, Orientation::row), 1};
}

/// Gamma_t(z_1..z_t)(u) = Gamma_{t-1}(z_1..z_{t-1})(z_t) * H_t(z_t, u).
inline GammaVector gamma_step(const GammaVector& g, int zt, const SingletonPairModel& m, std::size_t t) {
  const std::size_t n = m.n_states();
  if (t != g.t + 1 || t > m.length()) throw invalid_argument("gamma_step: t must follow the previous prefix length");
  if (zt < 0 || static_cast<std::size_t>(zt) >= n) throw invalid_argument("state out of range");
  const double base = g.values.log_entry(zt);
  std::vector<double> logs(n);
  for (std::size_t u = 0; u < n; ++u) logs[u] = base + m.theta(t, zt) + m.psi(t, zt, u);
  return {ScaledVector::from_logs(logs, Orientation::row), t};
}

inline GammaVector gamma_of_prefix(const SingletonPairModel& m, std::span<const int> prefix) {
  if (prefix.empty() || prefix.size() > m.length()) throw invalid_argument("prefix length out of range");
  GammaVector g = gamma_init(m, prefix[0]);
  for (std::size_t t = 2; t <= prefix.size(); ++t) g = gamma_step(g, prefix[t - 1], m, t);
  return g;
}

/// D_1..D_T plus the constant. Built once per model and read-only after.
class FutureConditional {
 public:
  explicit FutureConditional(const SingletonPairModel& m) : model_(m) {
    const std::size_t n = m.n_states();
    const std::size_t len = m.length();
    d_.resize(len);
    d_[len - 1] = ScaledVector::unit(n, 0, Orientation::column);
    VectorSweep v(d_[len - 1]);
    for (std::size_t t = len; t >= 2; --t) {
      v.left_multiply(future_transfer(m, t));
      d_[t - 2] = v.value();
    }
    v.left_multiply(future_transfer(m, 1));
    constant_ = v.value().total();
  }

  const SingletonPairModel& model() const { return model_; }
  LogValue constant() const { return constant_; }

  /// D_t, t in 1..T.
  const ScaledVector& d(std::size_t t) const { return d_.at(t - 1); }

  double marginal(std::span<const int> prefix) const {
    const GammaVector g = gamma_of_prefix(model_, prefix);
    const LogValue num = scaled_dot(g.values, d(g.t));
    return (num / constant_).to_double();
  }

 private:
  SingletonPairModel model_;
  std::vector<ScaledVector> d_;
  LogValue constant_;
};

inline LogValue constant_via_future(const SingletonPairModel& m) { return FutureConditional(m).constant(); }

/// pi(z_1..z_t) = Gamma_t(z_1..z_t) . D_t / C.
inline double marginal_via_future(const SingletonPairModel& m, std::size_t t, std::span<const int> prefix) {
  if (prefix.size() != t) throw invalid_argument("prefix must hold exactly t states");
  return FutureConditional(m).marginal(prefix);
}

/// Energy sum_s theta_s(z_s) + sum_s psi1_s(z_s, z_{s+1}) + sum_s psi2_s(z_s, z_{s+2}).
/// psi1_T, psi2_{T-1} and psi2_T are zero and not stored.
class TwoLagModel {
 public:
  TwoLagModel() = default;

  TwoLagModel(std::size_t n_states, std::size_t length, StepSequence<std::vector<double>> singletons,
              StepSequence<Table> lag1, StepSequence<Table> lag2)
      : n_(n_states), length_(length), theta_(std::move(singletons)), psi1_(std::move(lag1)), psi2_(std::move(lag2)) {
    if (length_ < 3) throw invalid_model("two-lag model needs T >= 3");
    if (n_ < 2) throw invalid_model("model needs at least 2 states");
    if (theta_.size() != length_ || psi1_.size() != length_ - 1 || psi2_.size() != length_ - 2)
      throw invalid_model("two-lag model needs T singletons, T-1 lag-1 and T-2 lag-2 tables");
    for (const auto& t : theta_.distinct())
      if (t.size() != n_ || !detail::all_finite(t)) throw invalid_model("bad singleton vector");
    for (const auto* seq : {&psi1_, &psi2_})
      for (const Table& t : seq->distinct())
        if (t.rows() != n_ || t.cols() != n_ || !t.all_finite()) throw invalid_model("bad pair table");
  }

  std::size_t n_states() const { return n_; }
  std::size_t length() const { return length_; }

  double theta(std::size_t s, std::size_t u) const { return theta_[s - 1][u]; }
  /// Zero for s >= T.
  double psi1(std::size_t s, std::size_t u, std::size_t v) const { return s >= length_ ? 0.0 : psi1_[s - 1](u, v); }
  /// Zero for s >= T-1.
  double psi2(std::size_t s, std::size_t u, std::size_t v) const { return s + 1 >= length_ ? 0.0 : psi2_[s - 1](u, v); }

 private:
  std::size_t n_ = 0;
  std::size_t length_ = 0;
  StepSequence<std::vector<double>> theta_;
  StepSequence<Table> psi1_;
  StepSequence<Table> psi2_;
};

inline double energy(const TwoLagModel& m, std::span<const int> z) {
  detail::check_configuration(z, m.length(), m.n_states());
  double u = 0.0;
  for (std::size_t s = 1; s <= m.length(); ++s) {
    const auto a = static_cast<std::size_t>(z[s - 1]);
    u += m.theta(s, a);
    if (s + 1 <= m.length()) u += m.psi1(s, a, static_cast<std::size_t>(z[s]));
    if (s + 2 <= m.length()) u += m.psi2(s, a, static_cast<std::size_t>(z[s + 1]));
  }
  return u;
}

/// Same Gamma/D scheme on pairs (u, v) = (z_{t+1}, z_{t+2}), index u*N + v:
///   Gamma_t(u, v) = Gamma_{t-1}(z_t, u) * exp{theta_t(z_t) + psi1_t(z_t, u) + psi2_t(z_t, v)},
///   D_{t-1}(w, u) = sum_v exp{theta_t(w) + psi1_t(w, u) + psi2_t(w, v)} D_t(u, v),
/// with D_T = e_(0,0). The lifted H* matrices are never formed.
class TwoLagRecursion {
 public:
  explicit TwoLagRecursion(const TwoLagModel& m, const Limits& limits = {}) : model_(m) {
    const std::size_t n = m.n_states();
    if (n * n > limits.max_states) throw capacity_exceeded("two-lag state space N^2 exceeds the configured cap");
    const std::size_t len = m.length();
    d_.resize(len);
    d_[len - 1] = ScaledVector::unit(n * n, 0, Orientation::column);
    ScaledVector cur = d_[len - 1];
    CompensatedSum scale;
    for (std::size_t t = len; t >= 2; --t) {
      const ScaledVector next = step_back(t, cur);
      scale += next.log_scale();
      cur = ScaledVector(next.mantissa(), Orientation::column);
      d_[t - 2] = ScaledVector(cur.mantissa(), Orientation::column, scale.value());
    }
    const ScaledVector first = step_back(1, cur);
    constant_ = LogValue::from_log(first.total().log_magnitude() + scale.value());
  }

  LogValue constant() const { return constant_; }
  const ScaledVector& d(std::size_t t) const { return d_.at(t - 1); }

  ScaledVector gamma(std::span<const int> prefix) const {
    const std::size_t n = model_.n_states();
    if (prefix.empty() || prefix.size() > model_.length()) throw invalid_argument("prefix length out of range");
    for (int z : prefix)
      if (z < 0 || static_cast<std::size_t>(z) >= n) throw invalid_argument("state out of range");
    std::vector<double> logs(n * n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) logs[u * n + v] = local(1, prefix[0], u, v);
    ScaledVector g = ScaledVector::from_logs(logs, Orientation::row);
    for (std::size_t t = 2; t <= prefix.size(); ++t) {
      const auto zt = static_cast<std::size_t>(prefix[t - 1]);
      for (std::size_t u = 0; u < n; ++u) {
        const double prev = g.log_entry(zt * n + u);
        for (std::size_t v = 0; v < n; ++v) logs[u * n + v] = prev + local(t, zt, u, v);
      }
      g = ScaledVector::from_logs(logs, Orientation::row);
    }
    return g;
  }

  double marginal(std::span<const int> prefix) const {
    return (scaled_dot(gamma(prefix), d(prefix.size())) / constant_).to_double();
  }

 private:
  double local(std::size_t t, std::size_t w, std::size_t u, std::size_t v) const {
    return model_.theta(t, w) + model_.psi1(t, w, u) + model_.psi2(t, w, v);
  }

  // Returns the vector over (w, u) of sum_v exp(local(t, w, u, v)) D(u, v),
  // including the scale of d.
  ScaledVector step_back(std::size_t t, const ScaledVector& d) const {
    const std::size_t n = model_.n_states();
    std::vector<double> logs(n * n);
    for (std::size_t w = 0; w < n; ++w)
      for (std::size_t u = 0; u < n; ++u) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) mx = std::max(mx, local(t, w, u, v));
        double s = 0.0;
        for (std::size_t v = 0; v < n; ++v) s += std::exp(local(t, w, u, v) - mx) * d.mantissa(u * n + v);
        logs[w * n + u] = s > 0.0 ? mx + std::log(s) + d.log_scale() : -std::numeric_limits<double>::infinity();
      }
    return ScaledVector::from_logs(logs, Orientation::column);
  }

  TwoLagModel model_;
  std::vector<ScaledVector> d_;
  LogValue constant_;
};

inline LogValue two_lag_constant(const TwoLagModel& m, const Limits& limits = {}) {
  return TwoLagRecursion(m, limits).constant();
}

inline double two_lag_marginal(const TwoLagModel& m, std::size_t t, std::span<const int> prefix,
                               const Limits& limits = {}) {
  if (prefix.size() != t) throw invalid_argument("prefix must hold exactly t states");
  return TwoLagRecursion(m, limits).marginal(prefix);
}

/// The same energy as a range-2 model: factor s covers (z_s, z_{s+1}, z_{s+2})
/// and the last factor also absorbs theta_{T-1}, theta_T and psi1_{T-1}.
inline RRangeModel to_r_range(const TwoLagModel& m) {
  const std::size_t n = m.n_states();
  const std::size_t len = m.length();
  std::vector<std::vector<double>> factors;
  for (std::size_t s = 1; s + 2 <= len; ++s) {
    std::vector<double> f(n * n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) {
          double x = m.theta(s, a) + m.psi1(s, a, b) + m.psi2(s, a, c);
          if (s + 2 == len) x += m.theta(s + 1, b) + m.theta(s + 2, c) + m.psi1(s + 1, b, c);
          f[(a * n + b) * n + c] = x;
        }
    factors.push_back(std::move(f));
  }
  return {n, len, 2, StepSequence<std::vector<double>>::from_list(std::move(factors))};
}

}  // namespace gibbs
