#pragma once

// Overflow-safe nonnegative matrices and vectors.
//
// Every value is stored as exp(log_scale) * mantissa with mantissa entries in
// [0, 1]. After every public operation a nonzero object has its largest
// mantissa entry equal to exactly 1; an all-zero object has log_scale 0.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gibbs/error.hpp"
#include "gibbs/log_value.hpp"
#include "gibbs/table.hpp"

namespace gibbs {

namespace detail {

// Divides by the max entry; returns log(max) or -inf if all zero.
inline double renormalize(std::vector<double>& m) {
  double mx = 0.0;
  for (double v : m) mx = std::max(mx, v);
  if (mx == 0.0) return -std::numeric_limits<double>::infinity();
  if (mx != 1.0)
    for (double& v : m) v /= mx;
  return std::log(mx);
}

}  // namespace detail

class ScaledNonNegMatrix {
 public:
  ScaledNonNegMatrix() = default;

  /// Represents exp(log_scale) * values. Entries must be finite and >= 0.
  ScaledNonNegMatrix(std::size_t rows, std::size_t cols, std::vector<double> values, double log_scale = 0.0)
      : rows_(rows), cols_(cols), mantissa_(std::move(values)) {
    if (mantissa_.size() != rows * cols) throw dimension_mismatch("mantissa size does not match shape");
    for (double v : mantissa_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_argument("scaled matrix entries must be finite and nonnegative");
    set_scale(log_scale + detail::renormalize(mantissa_));
  }

  static ScaledNonNegMatrix identity(std::size_t n) {
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
    return {n, n, std::move(m)};
  }

  /// Entrywise exp of a finite log table: log_scale = max(h),
  /// mantissa = exp(h - max(h)).
  static ScaledNonNegMatrix from_log_table(const Table& h) {
    if (!h.all_finite()) throw invalid_model("non-finite entry");
    ScaledNonNegMatrix out;
    out.rows_ = h.rows();
    out.cols_ = h.cols();
    if (h.values().empty()) return out;
    const double mx = *std::max_element(h.values().begin(), h.values().end());
    out.mantissa_.resize(h.values().size());
    for (std::size_t i = 0; i < out.mantissa_.size(); ++i) out.mantissa_[i] = std::exp(h.values()[i] - mx);
    out.log_scale_ = mx;
    out.zero_ = false;
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool is_zero() const { return zero_; }
  double log_scale() const { return log_scale_; }
  const std::vector<double>& mantissa() const { return mantissa_; }
  double mantissa(std::size_t r, std::size_t c) const { return mantissa_[r * cols_ + c]; }

  /// Natural log of entry (r, c); -inf for a zero entry.
  double log_entry(std::size_t r, std::size_t c) const {
    const double m = mantissa(r, c);
    return m > 0.0 ? std::log(m) + log_scale_ : -std::numeric_limits<double>::infinity();
  }

  LogValue entry(std::size_t r, std::size_t c) const { return LogValue::from_log(log_entry(r, c)); }

 private:
  friend ScaledNonNegMatrix scaled_matmul(const ScaledNonNegMatrix&, const ScaledNonNegMatrix&);

  void set_scale(double log_scale) {
    zero_ = log_scale == -std::numeric_limits<double>::infinity();
    log_scale_ = zero_ ? 0.0 : log_scale;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> mantissa_;
  double log_scale_ = 0.0;
  bool zero_ = true;
};

enum class Orientation { row, column };

class ScaledVector {
 public:
  ScaledVector() = default;

  ScaledVector(std::vector<double> values, Orientation orientation, double log_scale = 0.0)
      : mantissa_(std::move(values)), orientation_(orientation) {
    for (double v : mantissa_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_argument("scaled vector entries must be finite and nonnegative");
    set_scale(log_scale + detail::renormalize(mantissa_));
  }

  static ScaledVector ones(std::size_t n, Orientation o) { return {std::vector<double>(n, 1.0), o}; }

  static ScaledVector unit(std::size_t n, std::size_t k, Orientation o) {
    std::vector<double> v(n, 0.0);
    v.at(k) = 1.0;
    return {std::move(v), o};
  }

  /// Vector with entries exp(logs[i]); logs may contain -inf for zeros.
  static ScaledVector from_logs(std::span<const double> logs, Orientation o) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : logs) mx = std::max(mx, l);
    std::vector<double> m(logs.size(), 0.0);
    if (mx == -std::numeric_limits<double>::infinity()) return {std::move(m), o};
    for (std::size_t i = 0; i < logs.size(); ++i) m[i] = std::exp(logs[i] - mx);
    return {std::move(m), o, mx};
  }

  std::size_t size() const { return mantissa_.size(); }
  Orientation orientation() const { return orientation_; }
  bool is_zero() const { return zero_; }
  double log_scale() const { return log_scale_; }
  const std::vector<double>& mantissa() const { return mantissa_; }
  double mantissa(std::size_t i) const { return mantissa_[i]; }

  double log_entry(std::size_t i) const {
    const double m = mantissa_[i];
    return m > 0.0 ? std::log(m) + log_scale_ : -std::numeric_limits<double>::infinity();
  }
  LogValue entry(std::size_t i) const { return LogValue::from_log(log_entry(i)); }

  ScaledVector transposed() const {
    ScaledVector v = *this;
    v.orientation_ = orientation_ == Orientation::row ? Orientation::column : Orientation::row;
    return v;
  }

  /// Sum of entries.
  LogValue total() const {
    double s = 0.0;
    for (double v : mantissa_) s += v;
    return zero_ ? LogValue::zero() : LogValue::from_double(s) * LogValue::from_log(log_scale_);
  }

 private:
  void set_scale(double log_scale) {
    zero_ = log_scale == -std::numeric_limits<double>::infinity();
    log_scale_ = zero_ ? 0.0 : log_scale;
  }

  std::vector<double> mantissa_;
  double log_scale_ = 0.0;
  Orientation orientation_ = Orientation::column;
  bool zero_ = true;
};

/// Product a * b. Each output entry accumulates over the inner index in
/// increasing order, so results are reproducible bit for bit.
inline ScaledNonNegMatrix scaled_matmul(const ScaledNonNegMatrix& a, const ScaledNonNegMatrix& b) {
  if (a.cols() != b.rows()) throw dimension_mismatch("scaled_matmul: inner dimensions differ");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(n * m, 0.0);
  const double* pa = a.mantissa().data();
  const double* pb = b.mantissa().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data() + i * m;
    for (std::size_t l = 0; l < k; ++l) {
      const double x = pa[i * k + l];
      if (x == 0.0) continue;
      const double* brow = pb + l * m;
      for (std::size_t j = 0; j < m; ++j) row[j] += x * brow[j];
    }
  }
  if (a.is_zero() || b.is_zero()) return {n, m, std::vector<double>(n * m, 0.0)};
  return {n, m, std::move(out), a.log_scale() + b.log_scale()};
}

/// a^k by repeated squaring: O(log k) products.
inline ScaledNonNegMatrix scaled_matpow(const ScaledNonNegMatrix& a, std::uint64_t k) {
  if (!a.is_square()) throw dimension_mismatch("scaled_matpow: matrix is not square");
  ScaledNonNegMatrix result = ScaledNonNegMatrix::identity(a.rows());
  if (k == 0) return result;
  ScaledNonNegMatrix base = a;
  bool first = true;
  while (k > 0) {
    if (k & 1u) {
      result = first ? base : scaled_matmul(result, base);
      first = false;
    }
    k >>= 1u;
    if (k > 0) base = scaled_matmul(base, base);
  }
  return result;
}

/// Row vector times matrix.
inline ScaledVector scaled_vecmat(const ScaledVector& f, const ScaledNonNegMatrix& m) {
  if (f.orientation() != Orientation::row) throw dimension_mismatch("scaled_vecmat expects a row vector");
  if (f.size() != m.rows()) throw dimension_mismatch("scaled_vecmat: dimensions differ");
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t u = 0; u < m.rows(); ++u) {
    const double x = f.mantissa(u);
    if (x == 0.0) continue;
    const double* row = m.mantissa().data() + u * m.cols();
    for (std::size_t v = 0; v < m.cols(); ++v) out[v] += x * row[v];
  }
  if (f.is_zero() || m.is_zero()) return {std::vector<double>(m.cols(), 0.0), Orientation::row};
  return {std::move(out), Orientation::row, f.log_scale() + m.log_scale()};
}

/// Matrix times column vector.
inline ScaledVector scaled_matvec(const ScaledNonNegMatrix& m, const ScaledVector& b) {
  if (b.orientation() != Orientation::column) throw dimension_mismatch("scaled_matvec expects a column vector");
  if (b.size() != m.cols()) throw dimension_mismatch("scaled_matvec: dimensions differ");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t u = 0; u < m.rows(); ++u) {
    const double* row = m.mantissa().data() + u * m.cols();
    double s = 0.0;
    for (std::size_t v = 0; v < m.cols(); ++v) s += row[v] * b.mantissa(v);
    out[u] = s;
  }
  if (b.is_zero() || m.is_zero()) return {std::vector<double>(m.rows(), 0.0), Orientation::column};
  return {std::move(out), Orientation::column, m.log_scale() + b.log_scale()};
}

/// A vector carried through a long run of products. The mantissa is
/// renormalized each step and the log scale kept in a compensated sum, so
/// the scale of the result is good to a few ulps regardless of the run length.
class VectorSweep {
 public:
  explicit VectorSweep(const ScaledVector& start)
      : v_(start.mantissa(), start.orientation()), scale_(start.is_zero() ? 0.0 : start.log_scale()) {}

  void left_multiply(const ScaledNonNegMatrix& m) { absorb(scaled_matvec(m, v_)); }
  void right_multiply(const ScaledNonNegMatrix& m) { absorb(scaled_vecmat(v_, m)); }

  ScaledVector value() const {
    if (v_.is_zero()) return v_;
    return {v_.mantissa(), v_.orientation(), scale_.value()};
  }

 private:
  void absorb(const ScaledVector& next) {
    if (!next.is_zero()) scale_ += next.log_scale();
    v_ = ScaledVector(next.mantissa(), next.orientation());
  }

  ScaledVector v_;
  CompensatedSum scale_;
};

/// Inner product of a row and a column vector.
inline LogValue scaled_dot(const ScaledVector& f, const ScaledVector& b) {
  if (f.size() != b.size()) throw dimension_mismatch("scaled_dot: lengths differ");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.mantissa(i) * b.mantissa(i);
  if (f.is_zero() || b.is_zero() || s == 0.0) return LogValue::zero();
  return LogValue::from_log(std::log(s) + f.log_scale() + b.log_scale());
}

/// f * ms[0] * ... * ms[n-1] * b, evaluated as left-to-right vector sweeps
/// with compensated accumulation of the log scale.
inline LogValue quadratic_form(const ScaledVector& f, std::span<const ScaledNonNegMatrix> ms, const ScaledVector& b) {
  if (f.orientation() != Orientation::row || b.orientation() != Orientation::column)
    throw dimension_mismatch("quadratic_form expects a row vector on the left and a column on the right");
  ScaledVector v(f.mantissa(), Orientation::row);
  CompensatedSum log_scale(f.log_scale());
  bool zero = f.is_zero();
  for (const auto& m : ms) {
    v = scaled_vecmat(v, m);
    if (v.is_zero() || m.is_zero()) zero = true;
    // v entered with scale 0, so its new scale is this step's increment.
    log_scale += v.log_scale();
    v = ScaledVector(v.mantissa(), Orientation::row);
  }
  if (zero) return LogValue::zero();
  const LogValue tail = scaled_dot(v, b);
  if (tail.is_zero()) return tail;
  return LogValue::from_log(log_scale.value() + tail.log_magnitude());
}

}  // namespace gibbs
