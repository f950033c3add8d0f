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

/// @file estimator.hpp
/// @brief Heterodyne estimator functions.
///
/// For an operator A on {|0>, ..., |E>} and a precision 0 < eta < 1,
///
///   f_A(z, eta) = (1/eta) exp((1 - 1/eta)|z|^2)
///                 * sum_{k,l<=E} A_kl eta^{-(k+l)/2} L_{k,l}(z / sqrt(eta)),
///
/// where L_{k,l} are the normalised two-dimensional Laguerre polynomials
///
///   L_{k,l}(z) = sum_{p=0}^{min(k,l)} sqrt(k!) sqrt(l!) (-1)^p
///                / (p! (k-p)! (l-p)!) z^{l-p} conj(z)^{k-p}.
///
/// The heterodyne average of f_A approximates Tr(A rho) within eta * K_A for
/// any state supported on {|0>, ..., |E>}. This header also provides the
/// constants entering the confidence bounds (K_A, M_kl, C_kl, C_Psi) and a
/// second evaluation route for f_{|k><l|} through generalised Laguerre
/// polynomials, used to cross-check the direct sum.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hetcv/errors.hpp"
#include "hetcv/fock.hpp"
#include "hetcv/numeric.hpp"

namespace hetcv {

/// Largest Laguerre index accepted by the explicit sum. Beyond it the
/// alternating terms cancel too strongly for double precision.
inline constexpr int kMaxLaguerreIndex = 60;

/// Precision eta and cutoff E. Enforces 0 < eta < 1 and, when 2/E < 1,
/// eta < 2/E.
class EstimatorConfig {
 public:
  EstimatorConfig(double eta, int cutoff) : eta_(eta), cutoff_(cutoff) {
    if (cutoff < 0) throw ParameterError("EstimatorConfig: cutoff must be non-negative");
    if (!(eta > 0.0) || !std::isfinite(eta))
      throw ParameterError("EstimatorConfig: precision eta must be positive and finite");
    if (cutoff >= 3 && eta >= 2.0 / cutoff)
      throw ParameterError("EstimatorConfig: eta = " + std::to_string(eta) +
                           " violates eta < 2/E = " + std::to_string(2.0 / cutoff) +
                           " (cutoff E = " + std::to_string(cutoff) + ")");
    if (eta >= 1.0)
      throw ParameterError("EstimatorConfig: eta = " + std::to_string(eta) +
                           " violates eta < 1 (estimator validity range)");
  }

  double eta() const noexcept { return eta_; }
  int cutoff() const noexcept { return cutoff_; }

 private:
  double eta_;
  int cutoff_;
};

namespace detail {

inline cplx int_pow(cplx z, int n) {
  cplx r(1.0);
  cplx b = z;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

inline void check_laguerre_index(int k, int l) {
  if (k < 0 || l < 0 || k > kMaxLaguerreIndex || l > kMaxLaguerreIndex)
    throw ParameterError("Laguerre indices must lie in [0, 60], got (" + std::to_string(k) +
                         ", " + std::to_string(l) + ")");
}

// sqrt(k!) sqrt(l!) (-1)^p / (p! (k-p)! (l-p)!)
inline double laguerre2d_coefficient(int k, int l, int p) {
  const double log_mag = 0.5 * (log_factorial(k) + log_factorial(l)) - log_factorial(p) -
                         log_factorial(k - p) - log_factorial(l - p);
  const double mag = std::exp(log_mag);
  return (p % 2 == 0) ? mag : -mag;
}

// L_{k,l}(u) and sum of |terms| (a scale for rounding-error estimates).
inline cplx laguerre2d_with_scale(int k, int l, cplx u, double* scale) {
  const cplx uc = std::conj(u);
  cplx sum = 0.0;
  double abs_sum = 0.0;
  for (int p = 0; p <= std::min(k, l); ++p) {
    const cplx term = laguerre2d_coefficient(k, l, p) * int_pow(u, l - p) * int_pow(uc, k - p);
    sum += term;
    abs_sum += std::abs(term);
  }
  if (scale) *scale = abs_sum;
  return sum;
}

// f_A with the accumulated |term| scale.
inline cplx f_op_with_scale(const FockOperator& a, cplx z, const EstimatorConfig& cfg,
                            double* scale) {
  if (a.cutoff() > cfg.cutoff())
    throw ParameterError("f_op: operator cutoff " + std::to_string(a.cutoff()) +
                         " exceeds estimator cutoff " + std::to_string(cfg.cutoff()));
  const double eta = cfg.eta();
  const cplx u = z / std::sqrt(eta);
  cplx sum = 0.0;
  double abs_sum = 0.0;
  for (int k = 0; k <= a.cutoff(); ++k) {
    for (int l = 0; l <= a.cutoff(); ++l) {
      const cplx akl = a(k, l);
      if (akl == cplx(0.0)) continue;
      double s = 0.0;
      const double w = std::pow(eta, -0.5 * (k + l));
      sum += akl * w * laguerre2d_with_scale(k, l, u, &s);
      abs_sum += std::abs(akl) * w * s;
    }
  }
  const double gauss = std::exp((1.0 - 1.0 / eta) * std::norm(z)) / eta;
  if (scale) *scale = gauss * abs_sum;
  return gauss * sum;
}

}  // namespace detail

/// Normalised two-dimensional Laguerre polynomial L_{k,l}(z) by its explicit
/// finite sum. Indices above kMaxLaguerreIndex are rejected.
inline cplx laguerre2d(int k, int l, cplx z) {
  detail::check_laguerre_index(k, l);
  return detail::laguerre2d_with_scale(k, l, z, nullptr);
}

/// f_A(z, eta) by the direct double sum. Requires A.cutoff() <= cfg.cutoff().
inline cplx f_op(const FockOperator& a, cplx z, const EstimatorConfig& cfg) {
  detail::check_laguerre_index(a.cutoff(), a.cutoff());
  return detail::f_op_with_scale(a, z, cfg, nullptr);
}

/// f_{|k><l|}(z, eta) by the direct sum.
inline cplx f_elem(int k, int l, cplx z, const EstimatorConfig& cfg) {
  detail::check_laguerre_index(k, l);
  if (k > cfg.cutoff() || l > cfg.cutoff())
    throw ParameterError("f_elem: index exceeds estimator cutoff");
  const double eta = cfg.eta();
  const double log_scale = -(1.0 + 0.5 * (k + l)) * std::log(eta) + (1.0 - 1.0 / eta) * std::norm(z);
  if (log_scale < -745.0) return 0.0;
  return std::exp(log_scale) * laguerre2d(k, l, z / std::sqrt(eta));
}

/// Imaginary residue (relative to the term scale) above which f_pure reports
/// an internal inconsistency.
inline constexpr double kPureImaginaryTolerance = 1e-8;

/// f_{|psi><psi|}(z, eta). Real for a Hermitian target; the imaginary part is
/// checked and discarded.
inline double f_pure(const FockVector& psi, cplx z, const EstimatorConfig& cfg) {
  double scale = 0.0;
  const cplx v = detail::f_op_with_scale(FockOperator::projector(psi), z, cfg, &scale);
  if (std::abs(v.imag()) > kPureImaginaryTolerance * std::max(1.0, scale))
    throw ConsistencyError("f_pure: imaginary residue " + std::to_string(v.imag()) +
                           " for a Hermitian target");
  return v.real();
}

/// f_A(., eta) compiled into Gaussian times a polynomial in (z, conj z):
///
///   f_A(z) = (1/eta) exp((1 - 1/eta)|z|^2) sum_{a,b} B_ab z^a conj(z)^b.
///
/// Evaluation costs O(E^2) per point and is the form used in sample averages.
class EstimatorFunction {
 public:
  EstimatorFunction(const FockOperator& a, const EstimatorConfig& cfg)
      : eta_(cfg.eta()),
        degree_(a.cutoff()),
        rate_(1.0 - 1.0 / cfg.eta()),
        prefactor_(1.0 / cfg.eta()),
        coeff_(static_cast<std::size_t>((a.cutoff() + 1) * (a.cutoff() + 1)), cplx(0.0)) {
    if (a.cutoff() > cfg.cutoff())
      throw ParameterError("EstimatorFunction: operator cutoff exceeds estimator cutoff");
    detail::check_laguerre_index(degree_, degree_);
    for (int k = 0; k <= degree_; ++k) {
      for (int l = 0; l <= degree_; ++l) {
        const cplx akl = a(k, l);
        if (akl == cplx(0.0)) continue;
        for (int p = 0; p <= std::min(k, l); ++p) {
          // (z/sqrt(eta))^(l-p) conj(z/sqrt(eta))^(k-p) eta^{-(k+l)/2}
          const double w = detail::laguerre2d_coefficient(k, l, p) * std::pow(eta_, p - k - l);
          coeff_[index(l - p, k - p)] += akl * w;
        }
      }
    }
    // Trim to the highest power that actually occurs.
    int eff = 0;
    for (int a = 0; a <= degree_; ++a)
      for (int b = 0; b <= degree_; ++b)
        if (coeff_[index(a, b)] != cplx(0.0)) eff = std::max({eff, a, b});
    if (eff < degree_) {
      std::vector<cplx> packed(static_cast<std::size_t>((eff + 1) * (eff + 1)));
      for (int a = 0; a <= eff; ++a)
        for (int b = 0; b <= eff; ++b) packed[static_cast<std::size_t>(a * (eff + 1) + b)] = coeff_[index(a, b)];
      coeff_ = std::move(packed);
      degree_ = eff;
    }
  }

  /// f_{|k><l|}; the operator is stored at the smallest cutoff max(k, l).
  static EstimatorFunction elementary(int k, int l, const EstimatorConfig& cfg) {
    return EstimatorFunction(FockOperator::elementary(k, l, std::max(k, l)), cfg);
  }

  double eta() const noexcept { return eta_; }
  int degree() const noexcept { return degree_; }
  double gaussian_rate() const noexcept { return rate_; }
  double prefactor() const noexcept { return prefactor_; }

  /// sum_{a,b} B_ab zpow[a] zbarpow[b]; spans must hold at least degree()+1
  /// powers. degree() is the highest power present, at most the operator
  /// cutoff.
  cplx polynomial(std::span<const cplx> zpow, std::span<const cplx> zbarpow) const {
    cplx acc = 0.0;
    for (int a = 0; a <= degree_; ++a) {
      cplx row = 0.0;
      for (int b = 0; b <= degree_; ++b) row += coeff_[index(a, b)] * zbarpow[b];
      acc += row * zpow[a];
    }
    return acc;
  }

  cplx operator()(cplx z) const {
    const double x = rate_ * std::norm(z);
    if (x < -745.0) return 0.0;
    std::array<cplx, kMaxLaguerreIndex + 1> zp, zbp;
    zp[0] = zbp[0] = 1.0;
    for (int i = 1; i <= degree_; ++i) {
      zp[i] = zp[i - 1] * z;
      zbp[i] = zbp[i - 1] * std::conj(z);
    }
    return prefactor_ * std::exp(x) * polynomial(zp, zbp);
  }

 private:
  std::size_t index(int a, int b) const noexcept {
    return static_cast<std::size_t>(a * (degree_ + 1) + b);
  }

  double eta_;
  int degree_;
  double rate_;
  double prefactor_;
  std::vector<cplx> coeff_;
};

/// K_A = sum_{k,l} |A_kl| sqrt((k+1)(l+1)).
inline double k_const(const FockOperator& a) {
  double acc = 0.0;
  for (int k = 0; k <= a.cutoff(); ++k)
    for (int l = 0; l <= a.cutoff(); ++l)
      acc += std::abs(a(k, l)) * std::sqrt(static_cast<double>((k + 1) * (l + 1)));
  return acc;
}

/// K for |psi><psi|, computed as (sum_n |psi_n| sqrt(n+1))^2.
inline double k_const(const FockVector& psi) {
  double s = 0.0;
  for (int n = 0; n <= psi.cutoff(); ++n) s += std::abs(psi[n]) * std::sqrt(n + 1.0);
  return s * s;
}

/// ln M_kl = (1/2)(|l-k| ln 2 + ln binom(max, min)).
inline double log_m_bound(int k, int l) {
  if (k < 0 || l < 0) throw ParameterError("m_bound: negative index");
  const int hi = std::max(k, l);
  const int lo = std::min(k, l);
  return 0.5 * ((hi - lo) * std::numbers::ln2 + log_binomial(hi, lo));
}

/// M_kl = sqrt(2^|l-k| binom(max(k,l), min(k,l))), the envelope of
/// |f_{|k><l|}(z, eta)| * eta^{1 + (k+l)/2}.
inline double m_bound(int k, int l) { return std::exp(log_m_bound(k, l)); }

/// ln C_kl.
inline double log_c_kl(int k, int l) {
  if (k < 0 || l < 0) throw ParameterError("c_kl: negative index");
  const double kk = (k + 1.0) * (l + 1.0);
  return (1.0 + 0.5 * (k + l)) * std::log(kk) + 2.0 * log_m_bound(k, l);
}

/// C_kl = [(k+1)(l+1)]^{1+(k+l)/2} 2^|l-k| binom(max, min).
inline double c_kl(int k, int l) { return std::exp(log_c_kl(k, l)); }

/// ln C_Psi, see c_psi.
inline double log_c_psi(const FockVector& psi, double eps, int m) {
  if (!(eps > 0.0)) throw ParameterError("c_psi: eps must be positive");
  if (m < 1) throw ParameterError("c_psi: m must be at least 1");
  const double kpsi = k_const(psi);
  const double ratio = eps / m;
  if (!(ratio < kpsi))
    throw ParameterError("c_psi: eps/m = " + std::to_string(ratio) + " must be below K_Psi = " +
                         std::to_string(kpsi));
  const int e = psi.cutoff();
  std::vector<double> logs;
  for (int k = 0; k <= e; ++k) {
    for (int l = 0; l <= e; ++l) {
      const double w = std::abs(psi[k]) * std::abs(psi[l]);
      if (w == 0.0) continue;
      const double h = 0.5 * (k + l);
      logs.push_back(std::log(w) + (e - h) * std::log(ratio) + (1.0 + h) * std::log(kpsi) +
                     log_m_bound(k, l));
    }
  }
  return log_sum_exp(logs);
}

/// C_Psi = sum_{k,l<=E} |psi_k psi_l| (eps/m)^{E-(k+l)/2} K_Psi^{1+(k+l)/2} M_kl.
/// Requires eps/m < K_Psi.
inline double c_psi(const FockVector& psi, double eps, int m) {
  return std::exp(log_c_psi(psi, eps, m));
}

/// f_{|k><l|}(z, eta) through the generalised Laguerre identity
///
///   L_{k,l}(u) = (-1)^k sqrt(k!/l!) |u|^{l-k} e^{i(l-k)arg u} L_k^{(l-k)}(|u|^2)  (k <= l)
///
/// and its mirror for k > l. At z = 0 with k != l the phase is undefined and
/// the direct sum is used instead.
inline cplx f_elem_via_generalized_laguerre(int k, int l, cplx z, const EstimatorConfig& cfg) {
  detail::check_laguerre_index(k, l);
  if (k > cfg.cutoff() || l > cfg.cutoff())
    throw ParameterError("f_elem_via_generalized_laguerre: index exceeds estimator cutoff");
  if (z == cplx(0.0) && k != l) return f_elem(k, l, z, cfg);
  const double eta = cfg.eta();
  const double log_scale = -(1.0 + 0.5 * (k + l)) * std::log(eta) + (1.0 - 1.0 / eta) * std::norm(z);
  if (log_scale < -745.0) return 0.0;
  const double x = std::norm(z) / eta;
  const double r = std::sqrt(x);
  const double theta = std::arg(z);
  const int lo = std::min(k, l);
  const int d = std::abs(l - k);
  const double sign = (lo % 2 == 0) ? 1.0 : -1.0;
  const double ratio = std::exp(0.5 * (log_factorial(lo) - log_factorial(lo + d)));
  const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), x);
  const double phase = (k <= l) ? d * theta : -d * theta;
  const cplx poly = sign * ratio * std::polar(std::pow(r, d), phase) * lag;
  return std::exp(log_scale) * poly;
}

}  // namespace hetcv
