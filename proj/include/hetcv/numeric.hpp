/**
 * Copyright 2026 The hetcv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "hetcv/errors.hpp"

namespace hetcv {

using cplx = std::complex<double>;

namespace detail {

// n! as exact double products for n <= 20 (all exactly representable up to
// 18!, and correctly rounded for 19!, 20!).
inline constexpr std::array<double, 21> kFactorials = [] {
  std::array<double, 21> f{};
  f[0] = 1.0;
  for (int i = 1; i <= 20; ++i) f[i] = f[i - 1] * static_cast<double>(i);
  return f;
}();

}  // namespace detail

/// Largest n for which factorials are taken from direct products.
inline constexpr int kDirectFactorialLimit = 20;

/// ln(n!) for n >= 0. Direct products up to 20!, log-gamma above.
inline double log_factorial(std::int64_t n) {
  if (n < 0) throw ParameterError("log_factorial: negative argument " + std::to_string(n));
  if (n <= kDirectFactorialLimit) return std::log(detail::kFactorials[static_cast<std::size_t>(n)]);
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// n! for 0 <= n <= 20.
inline double factorial(int n) {
  if (n < 0 || n > kDirectFactorialLimit)
    throw ParameterError("factorial: argument outside [0, 20]: " + std::to_string(n));
  return detail::kFactorials[static_cast<std::size_t>(n)];
}

namespace detail {

inline constexpr std::int64_t kStirlingThreshold = 100000;

// ln n! - ln m! for m = n - k >= kStirlingThreshold. The Stirling series is
// differenced analytically so the O(n ln n) parts cancel exactly.
inline double log_factorial_ratio(std::int64_t n, std::int64_t k) {
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(n - k);
  const double kd = static_cast<double>(k);
  return -(nd + 0.5) * std::log1p(-kd / nd) + kd * (std::log(md) - 1.0) +
         (1.0 / (12.0 * nd) - 1.0 / (12.0 * md)) -
         (1.0 / (360.0 * nd * nd * nd) - 1.0 / (360.0 * md * md * md));
}

}  // namespace detail

/// ln binom(n, k); -inf when k is outside [0, n].
inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0) throw ParameterError("log_binomial: negative n " + std::to_string(n));
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  if (k > n - k) k = n - k;
  if (n - k >= detail::kStirlingThreshold) return detail::log_factorial_ratio(n, k) - log_factorial(k);
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// binom(n, k) as a double.
inline double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 1000) {
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
  }
  return std::exp(log_binomial(n, k));
}

/// ln(sum_i exp(x_i)), stable for large magnitudes. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> xs) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (xs.empty()) return kNegInf;
  const double top = *std::max_element(xs.begin(), xs.end());
  if (top == kNegInf) return kNegInf;
  if (std::isinf(top)) return top;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - top);
  return top + std::log(acc);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated sum for complex values, real and imaginary parts separately.
class ComplexSum {
 public:
  void add(cplx z) noexcept {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace hetcv
