#pragma once

// Randomized low-rank factorization H ~ P D Q^T:
//   1. O = orthonormal basis of H * Omega, Omega Gaussian with k + p columns
//   2. B = O^T H
//   3. B = R D Q^T (thin SVD of the small matrix)
//   4. P = O R
// The result keeps the first k singular triplets.

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "gibbs/eig.hpp"
#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/scaled.hpp"

namespace gibbs {

struct LowRankFactors {
  Eigen::MatrixXd left;      // rows x k, orthonormal columns
  Eigen::VectorXd singular;  // k, nonnegative, nonincreasing
  Eigen::MatrixXd right;     // cols x k, orthonormal columns
  double log_scale = 0.0;    // represented = exp(log_scale) * left * diag(singular) * right^T

  /// left * diag(singular) * right^T, without the log scale.
  Eigen::MatrixXd reconstruct_mantissa() const { return left * singular.asDiagonal() * right.transpose(); }
};

/// Gaussian test matrix from a seeded 64-bit Mersenne twister.
inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

inline LowRankFactors randomized_factorize(const Eigen::MatrixXd& h, std::size_t rank, std::size_t oversampling,
                                           std::uint64_t seed, int power_iterations = 0) {
  const auto min_dim = static_cast<std::size_t>(std::min(h.rows(), h.cols()));
  if (rank == 0 || rank + oversampling > min_dim)
    throw invalid_argument("randomized_factorize: need 1 <= rank and rank + oversampling <= min(rows, cols)");
  const auto l = static_cast<Eigen::Index>(rank + oversampling);

  auto orthonormal_basis = [](const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols()));
  };

  Eigen::MatrixXd o = orthonormal_basis(h * gaussian_matrix(h.cols(), l, seed));
  for (int it = 0; it < power_iterations; ++it) {
    const Eigen::MatrixXd z = orthonormal_basis(h.transpose() * o);
    o = orthonormal_basis(h * z);
  }

  const Eigen::MatrixXd b = o.transpose() * h;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const auto k = static_cast<Eigen::Index>(rank);
  LowRankFactors out;
  out.left = o * svd.matrixU().leftCols(k);
  out.singular = svd.singularValues().head(k);
  out.right = svd.matrixV().leftCols(k);
  return out;
}

inline LowRankFactors randomized_factorize(const ScaledNonNegMatrix& h, std::size_t rank, std::size_t oversampling,
                                           std::uint64_t seed, int power_iterations = 0) {
  LowRankFactors out = randomized_factorize(detail::to_eigen(h), rank, oversampling, seed, power_iterations);
  out.log_scale = h.log_scale();
  return out;
}

/// ||H - P D Q^T||_F / ||H||_F on the mantissa.
inline double relative_reconstruction_error(const Eigen::MatrixXd& h, const LowRankFactors& f) {
  const double norm = h.norm();
  return norm == 0.0 ? (f.reconstruct_mantissa()).norm() : (h - f.reconstruct_mantissa()).norm() / norm;
}

inline double relative_reconstruction_error(const ScaledNonNegMatrix& h, const LowRankFactors& f) {
  return relative_reconstruction_error(detail::to_eigen(h), f);
}

/// f * H^power * tail with H replaced by its low-rank factors:
/// (P D Q^T)^n = P (D Q^T P)^(n-1) D Q^T. Signed entries are kept with a
/// separate log scale. Throws if the approximation yields a nonpositive value.
inline LogValue low_rank_chain_constant(const ScaledVector& f, const LowRankFactors& h, std::uint64_t power,
                                        const ScaledVector& tail) {
  const auto n = static_cast<Eigen::Index>(f.size());
  if (h.left.rows() != n || h.right.rows() != static_cast<Eigen::Index>(tail.size()))
    throw dimension_mismatch("low_rank_chain_constant: dimensions differ");
  Eigen::RowVectorXd fr(n);
  for (Eigen::Index i = 0; i < n; ++i) fr(i) = f.mantissa(static_cast<std::size_t>(i));
  Eigen::VectorXd tc(tail.size());
  for (Eigen::Index i = 0; i < tc.size(); ++i) tc(i) = tail.mantissa(static_cast<std::size_t>(i));

  if (power == 0) {
    const double s = fr.dot(tc);
    if (!(s > 0.0)) throw error("low_rank_chain_constant: nonpositive result");
    return LogValue::from_log(std::log(s) + f.log_scale() + tail.log_scale());
  }

  // Left-to-right sweep in the k-dimensional core: x <- x * S, S = D Q^T P.
  const Eigen::MatrixXd core = h.singular.asDiagonal() * h.right.transpose() * h.left;
  Eigen::RowVectorXd x = fr * h.left;
  CompensatedSum log_scale(f.log_scale() + static_cast<double>(power) * h.log_scale);
  auto rescale = [&](Eigen::RowVectorXd& v) {
    const double m = v.cwiseAbs().maxCoeff();
    if (m == 0.0) return;
    v /= m;
    log_scale += std::log(m);
  };
  rescale(x);
  // Repeated squaring of the core keeps this O(k^3 log power).
  std::uint64_t remaining = power - 1;
  Eigen::MatrixXd base = core;
  double base_log = 0.0;
  while (remaining > 0) {
    if (remaining & 1u) {
      x = x * base;
      log_scale += base_log;
      rescale(x);
    }
    remaining >>= 1u;
    if (remaining > 0) {
      base = base * base;
      base_log *= 2.0;
      const double m = base.cwiseAbs().maxCoeff();
      if (m > 0.0) {
        base /= m;
        base_log += std::log(m);
      }
    }
  }
  const double s = (x * h.singular.asDiagonal() * h.right.transpose()).dot(tc);
  if (!(s > 0.0)) throw error("low_rank_chain_constant: nonpositive result, rank too small");
  return LogValue::from_log(log_scale.value() + std::log(s) + tail.log_scale());
}

}  // namespace gibbs
