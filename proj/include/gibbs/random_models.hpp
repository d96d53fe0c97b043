#pragma once

// Seeded random models for cross-checks. Log potentials are uniform on
// [-scale, scale].

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gibbs/future.hpp"
#include "gibbs/model.hpp"
#include "gibbs/step_sequence.hpp"
#include "gibbs/table.hpp"

namespace gibbs {

class ModelSampler {
 public:
  explicit ModelSampler(std::uint64_t seed, double scale = 1.0) : rng_(seed), unit_(-scale, scale) {}

  std::mt19937_64& engine() { return rng_; }

  double real() { return unit_(rng_); }

  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::vector<double> vector(std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = real();
    return v;
  }

  Table table(std::size_t n) { return {n, n, vector(n * n)}; }

  ChainModel chain(std::size_t n, std::size_t length, bool homogeneous = false) {
    if (homogeneous) return {n, length, StepSequence<Table>::repeated(table(n), length - 1, table(n))};
    std::vector<Table> h;
    for (std::size_t s = 1; s < length; ++s) h.push_back(table(n));
    return {n, length, StepSequence<Table>::from_list(std::move(h))};
  }

  SingletonPairModel singleton_pair(std::size_t n, std::size_t length) {
    std::vector<std::vector<double>> theta;
    std::vector<Table> psi;
    for (std::size_t s = 1; s <= length; ++s) theta.push_back(vector(n));
    for (std::size_t s = 1; s < length; ++s) psi.push_back(table(n));
    return {n, length, StepSequence<std::vector<double>>::from_list(std::move(theta)),
            StepSequence<Table>::from_list(std::move(psi))};
  }

  RRangeModel r_range(std::size_t n, std::size_t length, std::size_t range) {
    std::size_t tuples = 1;
    for (std::size_t i = 0; i <= range; ++i) tuples *= n;
    std::vector<std::vector<double>> f;
    for (std::size_t s = 0; s + range < length; ++s) f.push_back(vector(tuples));
    return {n, length, range, StepSequence<std::vector<double>>::from_list(std::move(f))};
  }

  TwoLagModel two_lag(std::size_t n, std::size_t length, bool zero_lag2 = false) {
    std::vector<std::vector<double>> theta;
    std::vector<Table> lag1, lag2;
    for (std::size_t s = 1; s <= length; ++s) theta.push_back(vector(n));
    for (std::size_t s = 1; s < length; ++s) lag1.push_back(table(n));
    for (std::size_t s = 2; s < length; ++s) lag2.push_back(zero_lag2 ? Table(n, n) : table(n));
    return {n, length, StepSequence<std::vector<double>>::from_list(std::move(theta)),
            StepSequence<Table>::from_list(std::move(lag1)), StepSequence<Table>::from_list(std::move(lag2))};
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_;
};

}  // namespace gibbs
