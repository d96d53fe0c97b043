#pragma once

// Dense eigendecomposition route for homogeneous chains. The decomposition
// itself is delegated to Eigen; this header only handles the scaling so that
// lambda^k never overflows.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/scaled.hpp"

namespace gibbs {

namespace detail {

inline Eigen::MatrixXd to_eigen(const ScaledNonNegMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m.mantissa(i, j);
  return out;
}

}  // namespace detail

/// f * body^power * tail through body = V diag(lambda) V^-1.
inline LogValue constant_via_eig(const ScaledVector& f, const ScaledNonNegMatrix& body, std::uint64_t power,
                                 const ScaledVector& tail) {
  if (!body.is_square() || f.size() != body.rows() || tail.size() != body.cols())
    throw dimension_mismatch("constant_via_eig: dimensions differ");
  if (f.is_zero() || tail.is_zero()) return LogValue::zero();
  if (body.is_zero()) return power == 0 ? scaled_dot(f, tail) : LogValue::zero();

  const Eigen::MatrixXd m = detail::to_eigen(body);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw error("constant_via_eig: eigendecomposition failed");
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd vecs = solver.eigenvectors();
  const Eigen::MatrixXcd inv = vecs.inverse();

  Eigen::RowVectorXcd fr(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fr(i) = f.mantissa(i);
  Eigen::VectorXcd tc(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) tc(i) = tail.mantissa(i);
  const Eigen::RowVectorXcd a = fr * vecs;
  const Eigen::VectorXcd b = inv * tc;

  double top = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) top = std::max(top, std::abs(lambda(i)));
  std::complex<double> s = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    s += a(i) * b(i) * std::pow(lambda(i) / top, static_cast<double>(power));
  if (!(s.real() > 0.0)) throw error("constant_via_eig: non-positive result, matrix is ill-conditioned for this route");
  const double p = static_cast<double>(power);
  return LogValue::from_log(p * (body.log_scale() + std::log(top)) + std::log(s.real()) + f.log_scale() +
                            tail.log_scale());
}

}  // namespace gibbs
