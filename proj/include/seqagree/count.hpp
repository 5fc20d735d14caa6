#pragma once

// Exact and log-space counting primitives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace seqagree {

/// Arbitrary-precision nonnegative count; never rounded.
using BigCount = boost::multiprecision::cpp_int;

inline constexpr long double kLogZero = -std::numeric_limits<long double>::infinity();

/// n (n-1) ... (n-r+1): ordered r-selections from n items. 1 for r = 0, 0 for r > n.
inline BigCount falling_factorial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  BigCount result = 1;
  for (std::size_t j = 0; j < r; ++j) result *= n - j;
  return result;
}

/// log of falling_factorial(n, r); kLogZero when the count is 0.
inline long double log_falling_factorial(std::size_t n, std::size_t r) {
  if (r > n) return kLogZero;
  if (r <= 32) {
    long double sum = 0.0L;
    for (std::size_t j = 0; j < r; ++j) sum += std::log(static_cast<long double>(n - j));
    return sum;
  }
  return std::lgamma(static_cast<long double>(n) + 1.0L) -
         std::lgamma(static_cast<long double>(n - r) + 1.0L);
}

inline BigCount binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  BigCount result = 1;
  for (std::size_t j = 1; j <= r; ++j) {
    result *= n - r + j;
    result /= j;  // exact: product of j consecutive integers is divisible by j!
  }
  return result;
}

/// Natural log of a positive count (kLogZero for 0), accurate to double precision.
inline long double log_of(const BigCount& value) {
  if (value <= 0) return kLogZero;
  const std::size_t top = boost::multiprecision::msb(value);
  if (top < 64) return std::log(static_cast<long double>(value.convert_to<unsigned long long>()));
  const std::size_t shift = top - 63;
  const BigCount head = value >> shift;
  return std::log(static_cast<long double>(head.convert_to<unsigned long long>())) +
         static_cast<long double>(shift) * std::log(2.0L);
}

/// num / den rounded to double with ~2^-60 relative error before the final rounding.
inline double ratio_to_double(const BigCount& num, const BigCount& den) {
  if (num == 0) return 0.0;
  const long long num_bits = static_cast<long long>(boost::multiprecision::msb(num));
  const long long den_bits = static_cast<long long>(boost::multiprecision::msb(den));
  const long long shift = std::max(0LL, den_bits - num_bits + 64);
  const BigCount quotient = (num << shift) / den;
  return static_cast<double>(std::ldexp(quotient.convert_to<long double>(), static_cast<int>(-shift)));
}

/// Running sum with Neumaier compensation.
template <typename Real = long double>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + carry_; }

 private:
  Real sum_ = 0;
  Real carry_ = 0;
};

}  // namespace seqagree
