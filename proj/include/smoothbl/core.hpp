#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// =============================================================================
// Shared numeric conventions for the smoothbl toolkit.
//
// All information quantities are in nats. Extended reals are plain IEEE
// doubles: +inf and -inf are first-class values and compare soundly, NaN is
// never produced on purpose.
// =============================================================================

namespace smoothbl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kLn2 = 0.69314718055994530942;

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (alphabet sizes, matrix dimensions, list lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument lies outside the admissible range of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed its enumeration cap.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": size " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

/// log(sum_i exp(v_i)), exact for -inf entries; -inf for an all -inf input.
inline double log_sum_exp(std::span<const double> v) {
  double hi = -kInf;
  for (double x : v) hi = std::max(hi, x);
  if (hi == -kInf) return -kInf;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// x log(x / y) with 0 log(0/y) = 0 and x log(x/0) = +inf for x > 0.
inline double xlogx_over_y(double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return kInf;
  return x * std::log(x / y);
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

inline double nats_to_bits(double v) { return v / kLn2; }

/// Mixed-radix index helpers for product alphabets. The first factor is the
/// most significant digit, matching the Kronecker-product layout.
inline std::size_t checked_power(std::size_t base, std::size_t n, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (base != 0 && out > cap / base) {
      throw ResourceCapError("alphabet size " + std::to_string(base) + "^" +
                             std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
    out *= base;
  }
  if (out > cap) {
    throw ResourceCapError("alphabet size exceeds cap " + std::to_string(cap));
  }
  return out;
}

/// Digits of `index` in base `radix`, most significant first.
inline std::vector<std::size_t> digits_of(std::size_t index, std::size_t radix, std::size_t n) {
  std::vector<std::size_t> d(n);
  for (std::size_t i = n; i-- > 0;) {
    d[i] = index % radix;
    index /= radix;
  }
  return d;
}

/// Mixed-radix digits of `index`, most significant first.
inline std::vector<std::size_t> digits_of_mixed(std::size_t index, const std::vector<std::size_t>& radices) {
  std::vector<std::size_t> d(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    d[i] = index % radices[i];
    index /= radices[i];
  }
  return d;
}

}  // namespace smoothbl
