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

/// @file certify.hpp
/// @brief Fidelity certification (i.i.d. copies) and verification (no i.i.d.
/// assumption) of a pure target state from heterodyne samples.
///
/// All failure probabilities are kept as natural logarithms and only clamped
/// to [0, 1] when reported.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hetcv/errors.hpp"
#include "hetcv/estimator.hpp"
#include "hetcv/fock.hpp"
#include "hetcv/heterodyne.hpp"
#include "hetcv/numeric.hpp"

namespace hetcv {

// ---------------------------------------------------------------------------
// Parameters

struct CertificationParams {
  std::int64_t n = 0;  ///< samples measured
  std::int64_t m = 1;  ///< copies certified
  std::int64_t s = 0;  ///< support threshold
  int E = 0;           ///< energy cutoff
  double eps = 0.0;
  double eps_prime = 0.0;
};

struct VerificationParams {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t q = 0;
  std::int64_t m = 1;
  std::int64_t s = 0;
  int E = 0;
  double eps = 0.0;
  double eps_prime = 0.0;
};

namespace detail {

inline void check_target(const FockVector& psi, int cutoff) {
  if (cutoff < 0) throw ParameterError("E must be non-negative");
  if (psi.cutoff() > cutoff)
    throw ParameterError("target cutoff " + std::to_string(psi.cutoff()) + " exceeds E = " +
                         std::to_string(cutoff));
}

inline void check_m(std::int64_t m) {
  if (m < 1) throw ParameterError("m must be at least 1");
  if (m > std::numeric_limits<int>::max()) throw ParameterError("m too large");
}

}  // namespace detail

/// eta = eps / (m K_Psi) for the fidelity estimator; validated for cutoff E.
inline EstimatorConfig fidelity_config(const FockVector& psi, std::int64_t m, double eps, int cutoff) {
  detail::check_m(m);
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  const double eta = eps / (static_cast<double>(m) * k_const(psi));
  try {
    return EstimatorConfig(eta, cutoff);
  } catch (const ParameterError& e) {
    throw ParameterError("fidelity estimator eps/(m K_Psi): " + std::string(e.what()));
  }
}

inline void validate(const CertificationParams& p, const FockVector& psi) {
  if (p.n < 1) throw ParameterError("certification: n must be at least 1");
  detail::check_m(p.m);
  if (p.s < 0 || p.s > p.n) throw ParameterError("certification: need 0 <= s <= n");
  if (!(p.eps > 0.0) || !(p.eps_prime > 0.0))
    throw ParameterError("certification: eps and eps' must be positive");
  detail::check_target(psi, p.E);
  fidelity_config(psi, p.m, p.eps, p.E);
}

inline void validate(const VerificationParams& p) {
  detail::check_m(p.m);
  if (p.k < 1) throw ParameterError("verification: k must be at least 1");
  if (p.s < 0) throw ParameterError("verification: s must be non-negative");
  if (p.q < p.m) throw ParameterError("verification: need q >= m");
  if (p.s > p.k) throw ParameterError("verification: need s <= k");
  if (p.n - 4 * p.q - p.m < 1) throw ParameterError("verification: need n - 4q - m >= 1");
  if (!(p.n > 8 * p.q)) throw ParameterError("verification: need n > 8q");
  if (p.E < 0) throw ParameterError("verification: E must be non-negative");
  if (!(p.eps > 0.0) || !(p.eps_prime > 0.0))
    throw ParameterError("verification: eps and eps' must be positive");
}

inline void validate(const VerificationParams& p, const FockVector& psi) {
  validate(p);
  detail::check_target(psi, p.E);
  fidelity_config(psi, p.m, p.eps, p.E);
}

// ---------------------------------------------------------------------------
// Probability budget

struct BudgetTerm {
  std::string name;
  double log_value = 0.0;
};

struct ProbabilityBudget {
  std::vector<BudgetTerm> terms;
  double total_log = -std::numeric_limits<double>::infinity();
  double total_clamped = 0.0;
  bool vacuous = false;

  static ProbabilityBudget from_terms(std::vector<BudgetTerm> terms, bool vacuous = false) {
    ProbabilityBudget b;
    b.terms = std::move(terms);
    std::vector<double> logs;
    for (const auto& t : b.terms) logs.push_back(t.log_value);
    b.total_log = log_sum_exp(logs);
    b.total_clamped = std::min(1.0, std::exp(b.total_log));
    b.vacuous = vacuous;
    return b;
  }

  double term(const std::string& name) const {
    for (const auto& t : terms)
      if (t.name == name) return t.log_value;
    throw ParameterError("budget has no term '" + name + "'");
  }
};

inline double clamp_probability(double log_p) { return std::min(1.0, std::exp(log_p)); }

// ---------------------------------------------------------------------------
// Fidelity estimate

/// clamp(base, 0, 1)^m.
inline double fidelity_from_mean(double base_mean, std::int64_t m) {
  return std::pow(std::clamp(base_mean, 0.0, 1.0), static_cast<double>(m));
}

/// (1/n) sum_i f_Psi(alpha_i, eps / (m K_Psi)) without clamping.
inline double fidelity_base_mean(std::span<const HeterodyneSample> samples, const FockVector& psi,
                                 std::int64_t m, double eps, int cutoff = -1) {
  if (samples.empty()) throw ParameterError("fidelity_estimate: empty sample list");
  const int e = cutoff < 0 ? psi.cutoff() : cutoff;
  const FockVector target = psi.padded(e);
  const EstimatorFunction f(FockOperator::projector(target), fidelity_config(target, m, eps, e));
  CompensatedSum acc;
  for (const auto& s : samples) acc.add(f(s.value).real());
  return acc.value() / static_cast<double>(samples.size());
}

/// [clamp((1/n) sum_i f_Psi(alpha_i, eps / (m K_Psi)), 0, 1)]^m.
inline double fidelity_estimate(std::span<const HeterodyneSample> samples, const FockVector& psi,
                                std::int64_t m, double eps, int cutoff = -1) {
  return fidelity_from_mean(fidelity_base_mean(samples, psi, m, eps, cutoff), m);
}

// ---------------------------------------------------------------------------
// Certification

/// ln[(s+1)^{3/2} / n] + (s+1)^2 / (n+1).
inline double p_support_iid(std::int64_t s, std::int64_t n) {
  if (n < 1 || s < 0 || s > n) throw ParameterError("p_support_iid: need 0 <= s <= n, n >= 1");
  const double s1 = static_cast<double>(s) + 1.0;
  return 1.5 * std::log(s1) - std::log(static_cast<double>(n)) + s1 * s1 / (static_cast<double>(n) + 1.0);
}

/// ln{2 exp[-n eps^{2+2E} eps'^2 / (2 m^{4+2E} C_Psi^2)]} given ln C_Psi.
inline double p_hoeffding_iid(std::int64_t n, std::int64_t m, int cutoff, double eps, double eps_prime,
                              double log_c_psi_value) {
  if (n < 1) throw ParameterError("p_hoeffding_iid: n must be at least 1");
  detail::check_m(m);
  const double e = cutoff;
  const double log_rate = std::log(static_cast<double>(n)) + (2.0 + 2.0 * e) * std::log(eps) +
                          2.0 * std::log(eps_prime) - std::numbers::ln2 -
                          (4.0 + 2.0 * e) * std::log(static_cast<double>(m)) - 2.0 * log_c_psi_value;
  return std::numbers::ln2 - std::exp(log_rate);
}

struct CertificationReport {
  CertificationParams params;
  std::int64_t r = 0;  ///< samples with |alpha|^2 > E
  bool passed = false;
  double base_mean = 0.0;
  double fidelity_estimate = 0.0;
  double radius = 0.0;  ///< eps + eps'
  double eta = 0.0;
  double k_psi = 0.0;
  double log_c_psi = 0.0;
  ProbabilityBudget budget;  ///< support, hoeffding
};

inline ProbabilityBudget certification_budget(const CertificationParams& p, const FockVector& psi) {
  validate(p, psi);
  const FockVector target = psi.padded(p.E);
  const double lc = log_c_psi(target, p.eps, static_cast<int>(p.m));
  return ProbabilityBudget::from_terms({{"support", p_support_iid(p.s, p.n)},
                                        {"hoeffding", p_hoeffding_iid(p.n, p.m, p.E, p.eps, p.eps_prime, lc)}});
}

/// Certification post-processing on n i.i.d. heterodyne samples: the
/// support test r <= s and the fidelity estimate, reused from the same data.
inline CertificationReport certify(std::span<const HeterodyneSample> samples, const FockVector& psi,
                                   const CertificationParams& params) {
  validate(params, psi);
  if (static_cast<std::int64_t>(samples.size()) != params.n)
    throw ParameterError("certify: got " + std::to_string(samples.size()) + " samples, params say n = " +
                         std::to_string(params.n));
  const FockVector target = psi.padded(params.E);
  CertificationReport rep;
  rep.params = params;
  rep.r = static_cast<std::int64_t>(support_count(samples, params.E));
  rep.passed = rep.r <= params.s;
  rep.base_mean = fidelity_base_mean(samples, target, params.m, params.eps, params.E);
  rep.fidelity_estimate = fidelity_from_mean(rep.base_mean, params.m);
  rep.radius = params.eps + params.eps_prime;
  rep.k_psi = k_const(target);
  rep.eta = params.eps / (static_cast<double>(params.m) * rep.k_psi);
  rep.log_c_psi = log_c_psi(target, params.eps, static_cast<int>(params.m));
  rep.budget = certification_budget(params, psi);
  return rep;
}

// ---------------------------------------------------------------------------
// Verification

/// ln{8 k^{3/2} exp[-(k/9)(q/n - 2s/k)^2]}.
inline double p_support(std::int64_t n, std::int64_t k, std::int64_t q, std::int64_t s) {
  if (n < 1 || k < 1) throw ParameterError("p_support: need n, k >= 1");
  const double kd = static_cast<double>(k);
  const double d = static_cast<double>(q) / static_cast<double>(n) - 2.0 * static_cast<double>(s) / kd;
  return std::log(8.0) + 1.5 * std::log(kd) - kd / 9.0 * d * d;
}

/// ln{q^{(E+1)^2/2} exp[-2q(q+1)/n]}.
inline double p_definetti(std::int64_t q, int cutoff, std::int64_t n) {
  if (q < 1 || n < 1) throw ParameterError("p_definetti: need q, n >= 1");
  const double qd = static_cast<double>(q);
  const double e1 = cutoff + 1.0;
  return 0.5 * e1 * e1 * std::log(qd) - 2.0 * qd * (qd + 1.0) / static_cast<double>(n);
}

/// ln[m(4q + m - 1) / (n - 4q)].
inline double p_choice(std::int64_t m, std::int64_t q, std::int64_t n) {
  if (n - 4 * q < 1) throw ParameterError("p_choice: need n > 4q");
  const double md = static_cast<double>(m);
  return std::log(md) + std::log(4.0 * static_cast<double>(q) + md - 1.0) -
         std::log(static_cast<double>(n - 4 * q));
}

struct HoeffdingTerm {
  double log_value = 0.0;
  bool vacuous = false;  ///< inner difference was negative; square floored at 0
};

/// ln{2 binom(n-4q, 4q) exp[-((n-8q)/(2 m^{4+2E})) (eps^{1+E} eps'/C_Psi - 8q m^{2+E}/(n-4q-m))^2]}.
inline HoeffdingTerm p_hoeffding(std::int64_t n, std::int64_t q, std::int64_t m, int cutoff, double eps,
                                 double eps_prime, double log_c_psi_value) {
  if (n - 4 * q - m < 1 || !(n > 8 * q)) throw ParameterError("p_hoeffding: need n - 4q - m >= 1, n > 8q");
  const double e = cutoff;
  const double md = static_cast<double>(m);
  const double lead = std::exp((1.0 + e) * std::log(eps) + std::log(eps_prime) - log_c_psi_value);
  const double penalty = std::exp(std::log(8.0 * static_cast<double>(q)) + (2.0 + e) * std::log(md) -
                                  std::log(static_cast<double>(n - 4 * q - m)));
  const double diff = lead - penalty;
  HoeffdingTerm t;
  t.vacuous = !(diff > 0.0);
  const double sq = t.vacuous ? 0.0 : diff * diff;
  const double rate = static_cast<double>(n - 8 * q) / (2.0 * std::pow(md, 4.0 + 2.0 * e));
  t.log_value = std::numbers::ln2 + log_binomial(n - 4 * q, 4 * q) - rate * sq;
  return t;
}

struct VerificationReport {
  VerificationParams params;
  std::int64_t r = 0;
  bool passed = false;
  double base_mean = 0.0;
  double fidelity_estimate = 0.0;
  double radius = 0.0;  ///< eps + eps' + P_deFinetti (unclamped)
  double eta = 0.0;
  double k_psi = 0.0;
  double log_c_psi = 0.0;
  ProbabilityBudget budget;  ///< support, deFinetti, choice, hoeffding
};

inline ProbabilityBudget verification_budget(const VerificationParams& p, const FockVector& psi) {
  validate(p, psi);
  const FockVector target = psi.padded(p.E);
  const double lc = log_c_psi(target, p.eps, static_cast<int>(p.m));
  const HoeffdingTerm h = p_hoeffding(p.n, p.q, p.m, p.E, p.eps, p.eps_prime, lc);
  return ProbabilityBudget::from_terms({{"support", p_support(p.n, p.k, p.q, p.s)},
                                        {"deFinetti", p_definetti(p.q, p.E, p.n)},
                                        {"choice", p_choice(p.m, p.q, p.n)},
                                        {"hoeffding", h.log_value}},
                                       h.vacuous);
}

/// Verification post-processing on one protocol run: support test on the k
/// support samples, fidelity estimate on the n - 4q - m estimate samples.
inline VerificationReport verify(const ProtocolSamples& samples, const FockVector& psi,
                                 const VerificationParams& params) {
  validate(params, psi);
  const auto want_est = params.n - 4 * params.q - params.m;
  if (static_cast<std::int64_t>(samples.support_samples.size()) != params.k ||
      static_cast<std::int64_t>(samples.estimate_samples.size()) != want_est)
    throw ParameterError("verify: sample counts (" + std::to_string(samples.support_samples.size()) + ", " +
                         std::to_string(samples.estimate_samples.size()) + ") do not match k = " +
                         std::to_string(params.k) + ", n - 4q - m = " + std::to_string(want_est));
  const FockVector target = psi.padded(params.E);
  VerificationReport rep;
  rep.params = params;
  rep.r = static_cast<std::int64_t>(support_count(samples.support_samples, params.E));
  rep.passed = rep.r <= params.s;
  rep.base_mean = fidelity_base_mean(samples.estimate_samples, target, params.m, params.eps, params.E);
  rep.fidelity_estimate = fidelity_from_mean(rep.base_mean, params.m);
  rep.budget = verification_budget(params, psi);
  rep.radius = params.eps + params.eps_prime + std::exp(rep.budget.term("deFinetti"));
  rep.k_psi = k_const(target);
  rep.eta = params.eps / (static_cast<double>(params.m) * rep.k_psi);
  rep.log_c_psi = log_c_psi(target, params.eps, static_cast<int>(params.m));
  return rep;
}

// ---------------------------------------------------------------------------
// Helpers

namespace detail {

/// base^exp in int64, or nullopt-like -1 on overflow.
inline std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base) return -1;
    r *= base;
  }
  return r;
}

}  // namespace detail

/// n = k = m^{19+8E}, q = m^{10+4E}, s = 1, eps = eps' = 1/m, every order
/// constant set to 1.
inline VerificationParams scaling_suggest(std::int64_t m, int cutoff) {
  detail::check_m(m);
  if (cutoff < 0) throw ParameterError("scaling_suggest: E must be non-negative");
  const int big = 19 + 8 * cutoff;
  const int small = 10 + 4 * cutoff;
  const std::int64_t n = detail::checked_pow(m, big);
  const std::int64_t q = detail::checked_pow(m, small);
  if (n < 0 || q < 0 || q > std::numeric_limits<std::int64_t>::max() / 8)
    throw ParameterError("scaling_suggest: n = m^" + std::to_string(big) + " ~ 10^" +
                         std::to_string(big * std::log10(static_cast<double>(m))) +
                         " overflows a 64-bit integer");
  VerificationParams p;
  p.n = n;
  p.k = n;
  p.q = q;
  p.m = m;
  p.s = 1;
  p.E = cutoff;
  p.eps = 1.0 / static_cast<double>(m);
  p.eps_prime = p.eps;
  validate(p);
  return p;
}

/// Support threshold heuristic: expected exceedances count * tail plus
/// `sigmas` binomial standard deviations, rounded up and capped at count.
/// A completeness aid only, not a soundness guarantee.
inline std::int64_t suggest_support_threshold(std::int64_t count, double tail_probability,
                                              double sigmas = 5.0) {
  if (count < 0) throw ParameterError("suggest_support_threshold: negative count");
  if (!(tail_probability >= 0.0 && tail_probability <= 1.0))
    throw ParameterError("suggest_support_threshold: tail probability outside [0, 1]");
  const double c = static_cast<double>(count);
  const double mean = c * tail_probability;
  const double sd = std::sqrt(c * tail_probability * (1.0 - tail_probability));
  return std::min(count, static_cast<std::int64_t>(std::ceil(mean + sigmas * sd)));
}

/// Total-variation deviation of any computation run on a state whose
/// infidelity with the ideal is beta: sqrt(beta).
inline double downstream_bound(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("downstream_bound: beta must lie in [0, 1]");
  return std::sqrt(beta);
}

}  // namespace hetcv
