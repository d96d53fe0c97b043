#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

namespace gibbs {

/// Neumaier-compensated running sum. Used for log scales accumulated over
/// very long chains, where a plain sum drifts by ~T ulps.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  CompensatedSum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// A nonnegative real stored as its natural logarithm. Covers values such as
/// 10^441402 that are far outside double range.
class LogValue {
 public:
  /// Zero.
  constexpr LogValue() = default;

  static LogValue zero() { return LogValue{}; }

  static LogValue from_log(double log_magnitude) {
    LogValue v;
    if (log_magnitude == -std::numeric_limits<double>::infinity()) return v;
    v.log_ = log_magnitude;
    v.zero_ = false;
    return v;
  }

  /// `x` must be nonnegative.
  static LogValue from_double(double x) { return x > 0.0 ? from_log(std::log(x)) : zero(); }

  bool is_zero() const { return zero_; }

  /// Natural log; -inf for zero.
  double log_magnitude() const { return zero_ ? -std::numeric_limits<double>::infinity() : log_; }
  double log10() const { return log_magnitude() / std::numbers::ln10; }

  /// Overflows to +inf when the value exceeds double range.
  double to_double() const { return zero_ ? 0.0 : std::exp(log_); }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.zero_ || b.zero_) return zero();
    return from_log(a.log_ + b.log_);
  }

  /// Division by zero yields +inf in log space.
  friend LogValue operator/(LogValue a, LogValue b) {
    if (a.zero_) return zero();
    if (b.zero_) return from_log(std::numeric_limits<double>::infinity());
    return from_log(a.log_ - b.log_);
  }

  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.zero_) return b;
    if (b.zero_) return a;
    const double hi = std::max(a.log_, b.log_);
    const double lo = std::min(a.log_, b.log_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  LogValue& operator*=(LogValue o) { return *this = *this * o; }
  LogValue& operator+=(LogValue o) { return *this = *this + o; }

  /// Decimal mantissa with 5 significant digits and a decimal exponent,
  /// e.g. "3.3441E+04".
  std::string scientific() const {
    if (zero_) return "0.0000E+00";
    const double l10 = log10();
    double exponent = std::floor(l10);
    double mantissa = std::pow(10.0, l10 - exponent);
    if (std::round(mantissa * 1e4) >= 1e5) {
      exponent += 1.0;
      mantissa /= 10.0;
    }
    char buf[64];
    const long long e = static_cast<long long>(exponent);
    std::snprintf(buf, sizeof buf, "%.4fE%c%02lld", mantissa, e < 0 ? '-' : '+', e < 0 ? -e : e);
    return buf;
  }

  /// Raw natural log printed with 15 significant digits.
  std::string log_string() const {
    if (zero_) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", log_);
    return buf;
  }

 private:
  double log_ = 0.0;
  bool zero_ = true;
};

/// Streaming log-sum-exp with running-max rescaling. Terms are added in call
/// order; the result does not depend on the magnitude of the first term.
class LogSumAccumulator {
 public:
  void add_log(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (empty_) {
      max_ = log_term;
      sum_ = 1.0;
      empty_ = false;
      return;
    }
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  void add(LogValue v) {
    if (!v.is_zero()) add_log(v.log_magnitude());
  }

  void merge(const LogSumAccumulator& o) {
    if (o.empty_) return;
    if (empty_) {
      *this = o;
      return;
    }
    if (o.max_ <= max_) {
      sum_ += o.sum_ * std::exp(o.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - o.max_) + o.sum_;
      max_ = o.max_;
    }
  }

  LogValue value() const { return empty_ ? LogValue::zero() : LogValue::from_log(max_ + std::log(sum_)); }

 private:
  double max_ = 0.0;
  double sum_ = 0.0;
  bool empty_ = true;
};

}  // namespace gibbs
