#pragma once

#include <cstddef>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gibbs/error.hpp"

namespace gibbs {

/// Size caps for dense intermediate objects.
struct Limits {
  /// Maximum number of entries of a materialized marginal table.
  std::size_t max_table_entries = std::size_t{1} << 20;
  /// Maximum side of a dense transfer matrix built by a lift.
  std::size_t max_states = std::size_t{1} << 12;
  /// Maximum number of column states in a matrix-free spatial sweep.
  std::size_t max_column_states = std::size_t{1} << 20;
};

/// Probability table over the configurations of a strictly increasing site
/// subset. Entries are stored lexicographically, first site most significant.
struct MarginalTable {
  std::vector<std::size_t> sites;  // 1-based
  std::vector<std::size_t> dims;   // alphabet size at each site
  std::vector<double> probs;

  std::size_t index(std::span<const int> config) const {
    if (config.size() != sites.size()) throw invalid_argument("configuration does not match the marginal's sites");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < config.size(); ++i) {
      if (config[i] < 0 || static_cast<std::size_t>(config[i]) >= dims[i]) throw invalid_argument("state out of range");
      idx = idx * dims[i] + static_cast<std::size_t>(config[i]);
    }
    return idx;
  }

  double at(std::span<const int> config) const { return probs[index(config)]; }

  std::vector<int> config(std::size_t idx) const {
    std::vector<int> c(sites.size());
    for (std::size_t i = sites.size(); i-- > 0;) {
      c[i] = static_cast<int>(idx % dims[i]);
      idx /= dims[i];
    }
    return c;
  }

  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

namespace detail {

inline std::size_t checked_table_size(std::span<const std::size_t> dims, std::size_t cap) {
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d != 0 && n > cap / d) throw capacity_exceeded("marginal table would exceed the configured entry cap");
    n *= d;
  }
  if (n > cap) throw capacity_exceeded("marginal table would exceed the configured entry cap");
  return n;
}

}  // namespace detail

/// One row per configuration (state labels, then the probability with 15
/// significant digits) and a trailing row holding the probability sum.
inline void write_csv(std::ostream& os, const MarginalTable& t,
                      const std::function<std::string(std::size_t)>& label = {}) {
  char buf[64];
  for (std::size_t s : t.sites) os << 'z' << s << ',';
  os << "probability\n";
  for (std::size_t i = 0; i < t.probs.size(); ++i) {
    for (int x : t.config(i)) os << (label ? label(static_cast<std::size_t>(x)) : std::to_string(x)) << ',';
    std::snprintf(buf, sizeof buf, "%.15g", t.probs[i]);
    os << buf << '\n';
  }
  os << "sum";
  for (std::size_t i = 0; i < t.sites.size(); ++i) os << ',';
  std::snprintf(buf, sizeof buf, "%.15g", t.sum());
  os << buf << '\n';
}

}  // namespace gibbs
