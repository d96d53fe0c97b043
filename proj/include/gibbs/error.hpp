#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model document or model value violates its invariants.
class invalid_model : public error {
 public:
  using error::error;
};

/// Operand shapes do not line up.
class dimension_mismatch : public error {
 public:
  using error::error;
};

/// A query argument is out of its domain (site index, state, level, rank).
class invalid_argument : public error {
 public:
  using error::error;
};

/// An enumeration budget or a matrix-size cap would be exceeded.
class capacity_exceeded : public error {
 public:
  using error::error;
};

}  // namespace gibbs
