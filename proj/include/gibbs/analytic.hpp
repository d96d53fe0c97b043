#pragma once

// Closed forms for the binary chain with h(u, v) = alpha*u + beta*u*v on
// {0, 1}, whose transfer matrix is [[1, 1], [e^alpha, e^(alpha+beta)]].

#include <cmath>
#include <cstdint>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"

namespace gibbs {

struct Eig2x2 {
  double lambda1;  // smaller eigenvalue (may be negative)
  double lambda2;  // Perron eigenvalue
  double delta;    // discriminant, always > 0
};

inline Eig2x2 analytic_eig_2x2(double alpha, double beta) {
  const double eab = std::exp(alpha + beta);
  const double delta = (1.0 - eab) * (1.0 - eab) + 4.0 * std::exp(alpha);
  const double root = std::sqrt(delta);
  const double trace = 1.0 + eab;
  // The cancelling root is recovered from the determinant to keep it accurate.
  const double lambda2 = 0.5 * (trace + root);
  const double lambda1 = (eab - std::exp(alpha)) / lambda2;
  return {lambda1, lambda2, delta};
}

/// Normalizing constant of the length-T binary chain in which every site
/// carries the singleton alpha*z (the last one folded into h_{T-1}), from
/// the two eigenvalues alone. O(1) in T.
inline LogValue binary_chain_constant(double alpha, double beta, std::uint64_t length) {
  if (length < 2) throw invalid_argument("binary_chain_constant: length must be >= 2");
  const auto [l1, l2, delta] = analytic_eig_2x2(alpha, beta);
  const double n = static_cast<double>(length - 1);
  const double ea = std::exp(alpha);
  const double eab = std::exp(alpha + beta);
  // C = l2^n * bracket / sqrt(delta), with rho = (l1/l2)^n kept bounded.
  const double rho = std::pow(l1 / l2, n);
  const double bracket = (rho * (l2 - 1.0) + (1.0 - l1)) * (1.0 + ea) + ea * (1.0 + eab) * (1.0 - rho);
  return LogValue::from_log(n * std::log(l2) + std::log(bracket) - 0.5 * std::log(delta));
}

}  // namespace gibbs
