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

/// @file tomography.hpp
/// @brief Density-matrix tomography from heterodyne samples with analytical
/// confidence radii.
///
/// The estimate of rho_kl is the sample mean of f_{|l><k|}(alpha, eps / K),
/// K = sqrt((k+1)(l+1)). For a state supported on {|0>, ..., |E>}, every
/// |rho_kl - estimate_kl| <= eps + eps' except with probability at most
///
///   4 sum_{0<=k<=l<=E} exp(-n eps^{2+k+l} eps'^2 / (4 C_kl)).
///
/// Estimates are reported raw: they need not be positive or unit-trace.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hetcv/errors.hpp"
#include "hetcv/estimator.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/numeric.hpp"

namespace hetcv {

/// eta used for element (k, l): eps / K_{|l><k|}.
inline double element_eta(int k, int l, double eps) {
  return eps / std::sqrt((k + 1.0) * (l + 1.0));
}

/// Estimator configuration for element (k, l) of a cutoff-E state. The error
/// names the binding eta constraint and the element.
inline EstimatorConfig element_config(int k, int l, double eps, int cutoff) {
  if (!(eps > 0.0)) throw ParameterError("tomography: eps must be positive");
  try {
    return EstimatorConfig(element_eta(k, l, eps), cutoff);
  } catch (const ParameterError& e) {
    throw ParameterError("tomography element (" + std::to_string(k) + ", " + std::to_string(l) +
                         "): " + e.what());
  }
}

/// Mean of f_{|l><k|}(alpha_i, eps / K_{|l><k|}). `cutoff` is the support
/// bound E used for the eta check; negative means max(k, l).
inline cplx estimate_element(std::span<const HeterodyneSample> samples, int k, int l, double eps,
                             int cutoff = -1) {
  if (samples.empty()) throw ParameterError("estimate_element: empty sample list");
  if (k < 0 || l < 0) throw ParameterError("estimate_element: negative index");
  const int e = cutoff < 0 ? std::max(k, l) : cutoff;
  if (k > e || l > e) throw ParameterError("estimate_element: index exceeds cutoff");
  const auto f = EstimatorFunction::elementary(l, k, element_config(k, l, eps, e));
  ComplexSum acc;
  for (const auto& s : samples) acc.add(f(s.value));
  return acc.value() / static_cast<double>(samples.size());
}

/// Streaming accumulator for all (E+1)^2 element estimates; samples may be
/// fed in any number of batches.
class TomographyAccumulator {
 public:
  TomographyAccumulator(int cutoff, double eps) : cutoff_(cutoff), eps_(eps) {
    if (cutoff < 0) throw ParameterError("tomography: cutoff must be non-negative");
    for (int k = 0; k <= cutoff; ++k) {
      for (int l = 0; l <= cutoff; ++l) {
        Element el{k, l, EstimatorFunction::elementary(l, k, element_config(k, l, eps, cutoff)), 0, {}};
        std::size_t r = 0;
        while (r < rates_.size() && rates_[r] != el.f.gaussian_rate()) ++r;
        if (r == rates_.size()) rates_.push_back(el.f.gaussian_rate());
        el.rate_index = r;
        elements_.push_back(std::move(el));
      }
    }
  }

  int cutoff() const noexcept { return cutoff_; }
  double epsilon() const noexcept { return eps_; }
  std::uint64_t count() const noexcept { return count_; }

  void add(std::span<const HeterodyneSample> samples) {
    std::vector<cplx> zp(cutoff_ + 1), zbp(cutoff_ + 1);
    std::vector<double> gauss(rates_.size());
    for (const auto& s : samples) {
      const cplx z = s.value;
      const double n2 = std::norm(z);
      zp[0] = zbp[0] = 1.0;
      for (int i = 1; i <= cutoff_; ++i) {
        zp[i] = zp[i - 1] * z;
        zbp[i] = zbp[i - 1] * std::conj(z);
      }
      for (std::size_t r = 0; r < rates_.size(); ++r) {
        const double x = rates_[r] * n2;
        gauss[r] = x < -745.0 ? 0.0 : std::exp(x);
      }
      for (auto& el : elements_) {
        const int d = el.f.degree();
        const cplx v = el.f.prefactor() * gauss[el.rate_index] *
                       el.f.polynomial(std::span(zp).first(d + 1), std::span(zbp).first(d + 1));
        el.sum.add(v);
      }
    }
    count_ += samples.size();
  }

  /// Current element means; requires count() > 0.
  CMatrix estimates() const {
    if (count_ == 0) throw ParameterError("tomography: no samples accumulated");
    CMatrix m(cutoff_ + 1, cutoff_ + 1);
    for (const auto& el : elements_) m(el.k, el.l) = el.sum.value() / static_cast<double>(count_);
    return m;
  }

 private:
  struct Element {
    int k;
    int l;
    EstimatorFunction f;  // f_{|l><k|}
    std::size_t rate_index;
    ComplexSum sum;
  };

  int cutoff_;
  double eps_;
  std::uint64_t count_ = 0;
  std::vector<double> rates_;
  std::vector<Element> elements_;
};

/// ln of 4 sum_{0<=k<=l<=E} exp(-n eps^{2+k+l} eps'^2 / (4 C_kl)).
inline double tomography_failure_log_prob(double n, int cutoff, double eps, double eps_prime) {
  if (!(eps > 0.0) || !(eps_prime > 0.0)) throw ParameterError("tomography: eps, eps' must be positive");
  std::vector<double> exps;
  for (int k = 0; k <= cutoff; ++k) {
    for (int l = k; l <= cutoff; ++l) {
      const double log_rate = std::log(n) + (2.0 + k + l) * std::log(eps) +
                              2.0 * std::log(eps_prime) - std::log(4.0) - log_c_kl(k, l);
      exps.push_back(-std::exp(log_rate));
    }
  }
  return std::log(4.0) + log_sum_exp(exps);
}

struct TomographyReport {
  CMatrix estimates;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  double confidence_radius = 0.0;  ///< eps + eps'
  double failure_log_prob = 0.0;   ///< natural log of the union bound
  std::uint64_t sample_count = 0;
  bool hermitized = false;

  int cutoff() const { return static_cast<int>(estimates.rows()) - 1; }
  double failure_probability() const { return std::min(1.0, std::exp(failure_log_prob)); }
};

inline TomographyReport make_tomography_report(const TomographyAccumulator& acc, double eps_prime,
                                               bool hermitize = false) {
  TomographyReport rep;
  rep.estimates = acc.estimates();
  if (hermitize) rep.estimates = 0.5 * (rep.estimates + rep.estimates.adjoint()).eval();
  rep.epsilon = acc.epsilon();
  rep.epsilon_prime = eps_prime;
  rep.confidence_radius = acc.epsilon() + eps_prime;
  rep.sample_count = acc.count();
  rep.hermitized = hermitize;
  rep.failure_log_prob = tomography_failure_log_prob(static_cast<double>(acc.count()), acc.cutoff(),
                                                     acc.epsilon(), eps_prime);
  return rep;
}

/// Estimates every rho_kl, 0 <= k, l <= E, from one shared sample set. With
/// `hermitize` the matrix is replaced by (M + M^dagger) / 2.
inline TomographyReport tomography_run(std::span<const HeterodyneSample> samples, int cutoff,
                                       double eps, double eps_prime, bool hermitize = false) {
  if (samples.empty()) throw ParameterError("tomography_run: empty sample list");
  if (!(eps_prime > 0.0)) throw ParameterError("tomography_run: eps' must be positive");
  TomographyAccumulator acc(cutoff, eps);
  acc.add(samples);
  return make_tomography_report(acc, eps_prime, hermitize);
}

/// Smallest n whose tomography failure bound is <= delta. Starts from the
/// inversion of the dominant (E, E) term with T = (E+1)(E+2)/2 union terms,
/// then tightens to the exact minimum by bisection on the full bound.
inline std::int64_t required_samples_tomography(int cutoff, double eps, double eps_prime, double delta) {
  if (cutoff < 0) throw ParameterError("required_samples_tomography: cutoff must be non-negative");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("required_samples_tomography: delta must lie in (0, 1)");
  if (!(eps > 0.0) || !(eps_prime > 0.0))
    throw ParameterError("required_samples_tomography: eps, eps' must be positive");
  const double terms = 0.5 * (cutoff + 1.0) * (cutoff + 2.0);
  const double log_n0 = std::log(4.0) + log_c_kl(cutoff, cutoff) + std::log(std::log(4.0 * terms / delta)) -
                        (2.0 + 2.0 * cutoff) * std::log(eps) - 2.0 * std::log(eps_prime);
  constexpr double kMaxN = 4.0e18;
  if (log_n0 > std::log(kMaxN))
    throw ParameterError("required_samples_tomography: sample count 10^" +
                         std::to_string(log_n0 / std::log(10.0)) + " overflows a 64-bit count");
  const double log_delta = std::log(delta);
  auto ok = [&](std::int64_t n) {
    return tomography_failure_log_prob(static_cast<double>(n), cutoff, eps, eps_prime) <= log_delta;
  };
  std::int64_t hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::exp(log_n0))));
  while (!ok(hi)) {
    if (hi > static_cast<std::int64_t>(kMaxN / 2))
      throw ParameterError("required_samples_tomography: no 64-bit sample count reaches delta");
    hi *= 2;
  }
  std::int64_t lo = 0;  // invariant: !ok(lo) or lo == 0, ok(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace hetcv
