#pragma once

// Dichotomous thinning of the binary Ising chain
//     h(z_s, z_{s+1}) = alpha z_s + beta z_s z_{s+1},  z in {-1, +1}.
//
// Keeping every other site of the chain gives a chain with transition P^2,
// which is again a nearest-neighbour Ising field with parameters
// (alpha', beta'). Iterating over T = 2^r + 1 sites gives the ladder
// (alpha_j, beta_j), j = r+1..1, on the nested subsets
//     S_{r+1} = {1..T} > S_r = {1, 3, ..., T} > ... > S_1 = {1, T},
// and the joint law factors as a product of centre conditionals, one level
// at a time, times the law of the two endpoints.
//
// Spins -1 and +1 are stored as state indices 0 and 1. In a TransitionPair,
// p is the probability of staying at +1 and q of staying at -1.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/model.hpp"
#include "gibbs/transfer.hpp"

namespace gibbs {

struct IsingChainParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Stay probabilities of a two-state chain,
///     P = [[p, 1-p], [1-q, q]] over (+1, -1).
/// The complements are stored separately so that p close to 1 keeps full
/// relative precision in 1 - p.
class TransitionPair {
 public:
  TransitionPair(double p, double q) : TransitionPair(p, q, 1.0 - p, 1.0 - q) {}

  TransitionPair(double p, double q, double leave_p, double leave_q)
      : p_(p), q_(q), leave_p_(leave_p), leave_q_(leave_q) {
    if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 && leave_p > 0.0 && leave_q > 0.0))
      throw invalid_argument("transition probabilities must lie in (0, 1)");
  }

  double p() const { return p_; }
  double q() const { return q_; }
  double one_minus_p() const { return leave_p_; }
  double one_minus_q() const { return leave_q_; }

  /// Two steps of the chain.
  TransitionPair squared() const {
    return {p_ * p_ + leave_p_ * leave_q_, q_ * q_ + leave_q_ * leave_p_, p_ * leave_p_ + leave_p_ * q_,
            q_ * leave_q_ + leave_q_ * p_};
  }

 private:
  double p_, q_, leave_p_, leave_q_;
};

namespace detail {

inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline int spin_to_state(int spin) {
  if (spin != -1 && spin != 1) throw invalid_argument("Ising spins must be -1 or +1");
  return spin > 0 ? 1 : 0;
}

}  // namespace detail

/// alpha = ln(p/q) / 2, beta = ln(pq / ((1-p)(1-q))) / 4.
inline IsingChainParams field_from_transition(const TransitionPair& tp) {
  const double lp = std::log(tp.p()), lq = std::log(tp.q());
  return {0.5 * (lp - lq), 0.25 * (lp + lq - std::log(tp.one_minus_p()) - std::log(tp.one_minus_q()))};
}

/// Stationary chain of the field: P(u, v) = H(u, v) phi(v) / (lambda phi(u))
/// with (lambda, phi) the Perron pair of H(u, v) = exp(alpha u + beta u v).
inline TransitionPair transition_from_field(const IsingChainParams& fp) {
  const double a = std::exp(-fp.alpha + fp.beta);  // H(-,-)
  const double b = std::exp(-fp.alpha - fp.beta);  // H(-,+)
  const double c = std::exp(fp.alpha - fp.beta);   // H(+,-)
  const double d = std::exp(fp.alpha + fp.beta);   // H(+,+)
  const double h = 0.5 * (a - d);
  const double s = std::sqrt(h * h + b * c);
  const double lambda = 0.5 * (a + d) + s;
  // lambda - d and lambda - a, each in the non-cancelling form.
  const double gap_d = h >= 0.0 ? h + s : b * c / (s - h);
  const double gap_a = h <= 0.0 ? s - h : b * c / (s + h);
  return {d / lambda, a / lambda, gap_d / lambda, gap_a / lambda};
}

/// One thinning step: parameters of the field seen on every other site.
inline IsingChainParams thin_once(const IsingChainParams& fp) {
  const double a = fp.alpha, b = fp.beta;
  const double alpha = 0.5 * (detail::softplus(2.0 * a + 4.0 * b) - detail::softplus(-2.0 * a + 4.0 * b));
  // beta' = ln[1 + e^(4b-2a) (1 - e^(-4b))^2 / (1 + e^(-2a))^2] / 4
  const double gap = std::abs(std::expm1(-4.0 * b));
  const double log_term = 4.0 * b - 2.0 * a + 2.0 * std::log(gap) - 2.0 * detail::softplus(-2.0 * a);
  return {alpha, 0.25 * detail::softplus(log_term)};
}

class DichotomousLadder {
 public:
  DichotomousLadder(const IsingChainParams& fp, std::size_t r) : r_(r) {
    if (r < 1) throw invalid_argument("ladder depth r must be at least 1");
    if (r > 30) throw invalid_argument("ladder depth r too large");
    levels_.resize(r + 1);
    levels_[r] = fp;
    for (std::size_t j = r; j >= 1; --j) levels_[j - 1] = thin_once(levels_[j]);
  }

  std::size_t depth() const { return r_; }
  std::size_t length() const { return (std::size_t{1} << r_) + 1; }

  /// (alpha_j, beta_j), j in 1..r+1.
  const IsingChainParams& level(std::size_t j) const { return levels_.at(j - 1); }

  /// Spacing of S_j.
  std::size_t spacing(std::size_t j) const { return std::size_t{1} << (r_ + 1 - j); }

  /// S_j as 1-based sites.
  std::vector<std::size_t> subset(std::size_t j) const {
    if (j < 1 || j > r_ + 1) throw invalid_argument("ladder level out of range");
    std::vector<std::size_t> s;
    for (std::size_t t = 1; t <= length(); t += spacing(j)) s.push_back(t);
    return s;
  }

 private:
  std::size_t r_;
  std::vector<IsingChainParams> levels_;
};

inline DichotomousLadder build_ladder(const IsingChainParams& fp, std::size_t r) { return {fp, r}; }

/// pi_j(z_center | z_left, z_right) for the Ising field with parameters fp:
///     exp(z (a + b (l + r))) / (exp(a + b (l + r)) + exp(-(a + b (l + r)))).
inline double center_conditional(const IsingChainParams& fp, int z_left, int z_right, int z_center) {
  detail::spin_to_state(z_left);
  detail::spin_to_state(z_right);
  detail::spin_to_state(z_center);
  const double field = fp.alpha + fp.beta * (z_left + z_right);
  return 1.0 / (1.0 + std::exp(-2.0 * z_center * field));
}

/// The chain h(u, v) = alpha u + beta u v on {-1, +1} as a ChainModel.
inline ChainModel ising_chain(const IsingChainParams& fp, std::size_t length) {
  Table h(2, 2);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      const double su = u ? 1.0 : -1.0, sv = v ? 1.0 : -1.0;
      h(u, v) = fp.alpha * su + fp.beta * su * sv;
    }
  return {2, length, StepSequence<Table>::repeated(std::move(h), length - 1), {"-1", "+1"}};
}

/// Ladder plus the exact endpoint law pi_1(z_1, z_T) of the finite chain.
class DichotomousPipeline {
 public:
  DichotomousPipeline(const IsingChainParams& fp, std::size_t r)
      : fp_(fp), ladder_(fp, r), chain_(ising_chain(fp, ladder_.length())) {
    const std::size_t ends[] = {1, ladder_.length()};
    endpoints_ = subset_marginal(chain_, ends);
  }

  const DichotomousLadder& ladder() const { return ladder_; }
  const ChainModel& chain() const { return chain_; }
  const MarginalTable& endpoint_law() const { return endpoints_; }

  /// Log probability of a spin configuration on S_j (j = r+1 is the full
  /// chain): product of centre conditionals of levels 2..j times pi_1.
  double log_marginal(std::size_t j, std::span<const int> spins) const {
    const std::size_t r = ladder_.depth();
    if (j < 1 || j > r + 1) throw invalid_argument("ladder level out of range");
    const std::size_t count = (std::size_t{1} << (j - 1)) + 1;
    if (spins.size() != count) throw invalid_argument("configuration size does not match |S_j|");
    for (int s : spins) detail::spin_to_state(s);

    double lp = 0.0;
    // Position k of S_j holds site 1 + k * spacing(j). Level i (2 <= i <= j)
    // adds the odd multiples of its own spacing, with neighbours one step away.
    for (std::size_t i = j; i >= 2; --i) {
      const std::size_t stride = std::size_t{1} << (j - i);  // spacing(i) in units of spacing(j)
      for (std::size_t k = stride; k < count; k += 2 * stride)
        lp += std::log(center_conditional(ladder_.level(i), spins[k - stride], spins[k + stride], spins[k]));
    }
    const int ends[] = {detail::spin_to_state(spins.front()), detail::spin_to_state(spins.back())};
    return lp + std::log(endpoints_.at(ends));
  }

  double joint(std::span<const int> spins) const {
    if (spins.size() != ladder_.length()) throw invalid_argument("configuration length must be 2^r + 1");
    return std::exp(log_marginal(ladder_.depth() + 1, spins));
  }

  double marginal(std::size_t j, std::span<const int> spins) const { return std::exp(log_marginal(j, spins)); }

  /// C = exp U(z) / pi(z) at the all-(+1) configuration.
  LogValue constant() const {
    const std::vector<int> spins(ladder_.length(), 1);
    const std::vector<int> states(ladder_.length(), 1);
    return LogValue::from_log(energy(chain_, states) - log_marginal(ladder_.depth() + 1, spins));
  }

 private:
  IsingChainParams fp_;
  DichotomousLadder ladder_;
  ChainModel chain_;
  MarginalTable endpoints_;
};

inline double joint_via_dichotomy(const IsingChainParams& fp, std::size_t r, std::span<const int> spins) {
  return DichotomousPipeline(fp, r).joint(spins);
}

inline double dichotomous_marginal(const IsingChainParams& fp, std::size_t r, std::size_t j, std::span<const int> spins) {
  return DichotomousPipeline(fp, r).marginal(j, spins);
}

inline LogValue constant_via_dichotomy(const IsingChainParams& fp, std::size_t r) {
  return DichotomousPipeline(fp, r).constant();
}

}  // namespace gibbs
