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

/// @file oracle.hpp
/// @brief Exact heterodyne expectations of the estimator functions.
///
/// For rho supported on {|0>, ..., |E>} and 0 <= k, l <= E,
///
///   E_{alpha ~ Q_rho}[f_{|l><k|}(alpha, eta)]
///     = rho_kl + sum_{m>k, n>l, m-n=k-l, m,n<=E} rho_mn eta^{(m+n-k-l)/2}
///                                                sqrt(binom(m,k) binom(n,l)),
///
/// which is the ground truth for every Monte-Carlo average in this library.
/// quadrature_expect integrates Q_rho * f_A numerically as an independent
/// second route.

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "hetcv/errors.hpp"
#include "hetcv/estimator.hpp"
#include "hetcv/fock.hpp"
#include "hetcv/heterodyne.hpp"

namespace hetcv {

/// Exact E[f_{|l><k|}(alpha, eta)] under Q_rho.
inline cplx expected_f_elem(const DensityMatrix& rho, int k, int l, const EstimatorConfig& cfg) {
  const int e = rho.cutoff();
  if (k < 0 || l < 0 || k > e || l > e)
    throw ParameterError("expected_f_elem: indices (" + std::to_string(k) + ", " +
                         std::to_string(l) + ") outside [0, " + std::to_string(e) + "]");
  const double eta = cfg.eta();
  cplx acc = rho(k, l);
  for (int s = 1; k + s <= e && l + s <= e; ++s) {
    const double w = std::pow(eta, s) *
                     std::exp(0.5 * (log_binomial(k + s, k) + log_binomial(l + s, l)));
    acc += rho(k + s, l + s) * w;
  }
  return acc;
}

/// Exact E[f_A(alpha, eta)] = sum_{k,l} A_lk E[f_{|l><k|}]. Entries of A
/// beyond the support of rho have zero expectation and are skipped.
inline cplx expected_f_op(const DensityMatrix& rho, const FockOperator& a, const EstimatorConfig& cfg) {
  if (a.cutoff() > cfg.cutoff())
    throw ParameterError("expected_f_op: operator cutoff exceeds estimator cutoff");
  const int e = std::min(a.cutoff(), rho.cutoff());
  cplx acc = 0.0;
  for (int k = 0; k <= e; ++k)
    for (int l = 0; l <= e; ++l)
      if (a(l, k) != cplx(0.0)) acc += a(l, k) * expected_f_elem(rho, k, l, cfg);
  return acc;
}

/// Tr(A rho) over the common support.
inline cplx trace_product(const FockOperator& a, const DensityMatrix& rho) {
  const int e = std::min(a.cutoff(), rho.cutoff());
  cplx acc = 0.0;
  for (int k = 0; k <= e; ++k)
    for (int l = 0; l <= e; ++l) acc += a(l, k) * rho(k, l);
  return acc;
}

inline constexpr double kDefaultQuadratureRadius = 8.0;
inline constexpr int kDefaultQuadratureGrid = 400;

/// Midpoint-rule integral of Q_rho(alpha) f_A(alpha, eta) over the square
/// [-radius, radius]^2 with grid x grid cells.
inline cplx quadrature_expect(const DensityMatrix& rho, const FockOperator& a,
                              const EstimatorConfig& cfg, double radius = kDefaultQuadratureRadius,
                              int grid = kDefaultQuadratureGrid) {
  if (!(radius > 0.0) || grid < 1) throw ParameterError("quadrature_expect: bad grid");
  const EstimatorFunction f(a, cfg);
  const double h = 2.0 * radius / grid;
  ComplexSum acc;
  for (int i = 0; i < grid; ++i) {
    const double x = -radius + (i + 0.5) * h;
    for (int j = 0; j < grid; ++j) {
      const double y = -radius + (j + 0.5) * h;
      const cplx alpha(x, y);
      acc.add(q_eval(rho, alpha) * f(alpha));
    }
  }
  return acc.value() * (h * h);
}

/// Closed form and quadrature must agree to this level.
inline constexpr double kOracleDisagreementLimit = 1e-4;

/// Evaluates both routes and throws ConsistencyError when they differ by
/// more than kOracleDisagreementLimit. Returns the closed-form value.
inline cplx cross_checked_expectation(const DensityMatrix& rho, const FockOperator& a,
                                      const EstimatorConfig& cfg,
                                      double radius = kDefaultQuadratureRadius,
                                      int grid = kDefaultQuadratureGrid) {
  const cplx exact = expected_f_op(rho, a, cfg);
  const cplx quad = quadrature_expect(rho, a, cfg, radius, grid);
  if (std::abs(exact - quad) > kOracleDisagreementLimit)
    throw ConsistencyError("oracle inconsistency: closed form and quadrature differ by " +
                           std::to_string(std::abs(exact - quad)));
  return exact;
}

}  // namespace hetcv
