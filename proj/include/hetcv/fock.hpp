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

/// @file fock.hpp
/// @brief Single-mode states and operators on the truncated Fock basis
/// {|0>, ..., |E>}, plus fidelity, trace distance, coherent-state overlaps
/// and the pure-loss channel.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hetcv/errors.hpp"
#include "hetcv/numeric.hpp"

namespace hetcv {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
inline constexpr double kPsdTolerance = -1e-10;
/// Spectral weights below this are dropped by spectral_decompose.
inline constexpr double kSpectralDropTolerance = 1e-12;

namespace detail {

inline std::string format_residual(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

inline double max_hermitian_residual(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix pad_matrix(const CMatrix& m, int cutoff) {
  CMatrix out = CMatrix::Zero(cutoff + 1, cutoff + 1);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

}  // namespace detail

/// Pure state amplitudes psi_0..psi_E. Always normalised.
class FockVector {
 public:
  /// Validates normalisation within kNormTolerance.
  explicit FockVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw ValidationError("FockVector: empty amplitude list");
    if (!amps_.allFinite()) throw ValidationError("FockVector: non-finite amplitude");
    const double residual = std::abs(amps_.squaredNorm() - 1.0);
    if (residual > kNormTolerance)
      throw ValidationError("FockVector: normalisation violated, |sum |psi_n|^2 - 1| = " +
                            detail::format_residual(residual));
  }

  /// Rescales arbitrary non-zero amplitudes to unit norm.
  static FockVector normalized(const CVector& raw) {
    const double norm = raw.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw ValidationError("FockVector: cannot normalise a zero or non-finite vector");
    return FockVector(raw / norm);
  }

  /// Fock state |n> in a basis truncated at `cutoff`.
  static FockVector basis(int n, int cutoff) {
    if (n < 0 || cutoff < n) throw ParameterError("FockVector::basis: need 0 <= n <= cutoff");
    CVector v = CVector::Zero(cutoff + 1);
    v[n] = 1.0;
    return FockVector(std::move(v));
  }

  int cutoff() const noexcept { return static_cast<int>(amps_.size()) - 1; }
  const CVector& amplitudes() const noexcept { return amps_; }
  cplx operator[](int n) const { return amps_[n]; }

  /// Zero-pads to a larger cutoff.
  FockVector padded(int cutoff) const {
    if (cutoff < this->cutoff()) throw ParameterError("FockVector::padded: cannot shrink a state");
    CVector v = CVector::Zero(cutoff + 1);
    v.head(amps_.size()) = amps_;
    return FockVector(std::move(v));
  }

 private:
  CVector amps_;
};

/// General square operator A_kl on the truncated basis.
class FockOperator {
 public:
  explicit FockOperator(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
      throw ValidationError("FockOperator: matrix must be square and non-empty");
    if (!entries_.allFinite()) throw ValidationError("FockOperator: non-finite entry");
  }

  /// |k><l| truncated at `cutoff`.
  static FockOperator elementary(int k, int l, int cutoff) {
    if (k < 0 || l < 0 || k > cutoff || l > cutoff)
      throw ParameterError("FockOperator::elementary: indices outside [0, cutoff]");
    CMatrix m = CMatrix::Zero(cutoff + 1, cutoff + 1);
    m(k, l) = 1.0;
    return FockOperator(std::move(m));
  }

  /// |psi><psi|.
  static FockOperator projector(const FockVector& psi) {
    return FockOperator(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static FockOperator identity(int cutoff) {
    return FockOperator(CMatrix::Identity(cutoff + 1, cutoff + 1));
  }

  int cutoff() const noexcept { return static_cast<int>(entries_.rows()) - 1; }
  const CMatrix& entries() const noexcept { return entries_; }
  cplx operator()(int k, int l) const { return entries_(k, l); }

  FockOperator adjoint() const { return FockOperator(entries_.adjoint()); }

  FockOperator padded(int cutoff) const {
    if (cutoff < this->cutoff()) throw ParameterError("FockOperator::padded: cannot shrink");
    return FockOperator(detail::pad_matrix(entries_, cutoff));
  }

 private:
  CMatrix entries_;
};

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity; the error names the violated
  /// invariant and its measured residual.
  explicit DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
      throw ValidationError("DensityMatrix: matrix must be square and non-empty");
    if (!entries_.allFinite()) throw ValidationError("DensityMatrix: non-finite entry");
    const double herm = detail::max_hermitian_residual(entries_);
    if (herm > kHermitianTolerance)
      throw ValidationError("DensityMatrix: not Hermitian, max |rho - rho^dagger| = " +
                            detail::format_residual(herm));
    const double trace_residual = std::abs(entries_.trace() - cplx(1.0));
    if (trace_residual > kTraceTolerance)
      throw ValidationError("DensityMatrix: trace must be 1, trace residual = " +
                            detail::format_residual(trace_residual));
    const CMatrix sym = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < kPsdTolerance)
      throw ValidationError("DensityMatrix: not positive semidefinite, minimum eigenvalue = " +
                            detail::format_residual(min_eig));
  }

  static DensityMatrix pure(const FockVector& psi) {
    CMatrix m = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityMatrix(0.5 * (m + m.adjoint()));
  }

  /// |n><n| truncated at `cutoff`.
  static DensityMatrix fock(int n, int cutoff) { return pure(FockVector::basis(n, cutoff)); }

  /// diag(p_0, ..., p_E).
  static DensityMatrix diagonal(const std::vector<double>& populations) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(populations.size()),
                              static_cast<Eigen::Index>(populations.size()));
    for (std::size_t i = 0; i < populations.size(); ++i) m(i, i) = populations[i];
    return DensityMatrix(std::move(m));
  }

  int cutoff() const noexcept { return static_cast<int>(entries_.rows()) - 1; }
  const CMatrix& entries() const noexcept { return entries_; }
  cplx operator()(int k, int l) const { return entries_(k, l); }

  FockOperator as_operator() const { return FockOperator(entries_); }

  DensityMatrix padded(int cutoff) const {
    if (cutoff < this->cutoff()) throw ParameterError("DensityMatrix::padded: cannot shrink");
    return DensityMatrix(detail::pad_matrix(entries_, cutoff));
  }

 private:
  CMatrix entries_;
};

/// How mismatched cutoffs are treated by binary operations.
enum class CutoffPolicy {
  kStrict,   ///< mismatch is a ParameterError
  kZeroPad,  ///< the smaller operand is zero-padded upward, with a warning
};

/// <psi|rho|psi>, clamped to [0, 1].
inline double fidelity_pure(const FockVector& psi, const DensityMatrix& rho,
                            CutoffPolicy policy = CutoffPolicy::kStrict) {
  if (psi.cutoff() != rho.cutoff()) {
    if (policy == CutoffPolicy::kStrict)
      throw ParameterError("fidelity_pure: cutoff mismatch (state " + std::to_string(psi.cutoff()) +
                           ", density matrix " + std::to_string(rho.cutoff()) + ")");
    const int e = std::max(psi.cutoff(), rho.cutoff());
    std::clog << "warning: fidelity_pure zero-padding operands to cutoff " << e << '\n';
    return fidelity_pure(psi.padded(e), rho.padded(e), CutoffPolicy::kStrict);
  }
  const CVector& v = psi.amplitudes();
  const cplx f = v.dot(rho.entries() * v);  // dot() conjugates its left operand
  return std::clamp(f.real(), 0.0, 1.0);
}

/// (1/2) sum |eigenvalues(rho1 - rho2)|, in [0, 1].
inline double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.cutoff() != rho2.cutoff())
    throw ParameterError("trace_distance: cutoff mismatch");
  const CMatrix diff = rho1.entries() - rho2.entries();
  const double herm = detail::max_hermitian_residual(diff);
  if (herm > 2 * kHermitianTolerance)
    throw ConsistencyError("trace_distance: difference is not Hermitian, residual " +
                           detail::format_residual(herm));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

/// Largest Fock index accepted by coherent_overlap.
inline constexpr int kMaxCoherentIndex = 300;

/// <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!), evaluated in log space.
inline cplx coherent_overlap(cplx alpha, int n) {
  if (n < 0 || n > kMaxCoherentIndex)
    throw ParameterError("coherent_overlap: n must lie in [0, 300], got " + std::to_string(n));
  const double r = std::abs(alpha);
  if (r == 0.0) return n == 0 ? cplx(1.0) : cplx(0.0);
  const double log_mag = -0.5 * r * r + n * std::log(r) - 0.5 * log_factorial(n);
  return std::polar(std::exp(log_mag), n * std::arg(alpha));
}

/// Pure-loss channel with transmissivity tau, via the Kraus operators
/// K_j = sum_n sqrt(binom(n, j) tau^(n-j) (1-tau)^j) |n-j><n|.
inline DensityMatrix apply_loss(const DensityMatrix& rho, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw ParameterError("apply_loss: transmissivity must lie in [0, 1]");
  if (tau == 1.0) return rho;
  const int e = rho.cutoff();
  const int dim = e + 1;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int j = 0; j <= e; ++j) {
    CMatrix kraus = CMatrix::Zero(dim, dim);
    for (int n = j; n <= e; ++n) {
      const double amp2 = binomial(n, j) * std::pow(tau, n - j) * std::pow(1.0 - tau, j);
      kraus(n - j, n) = std::sqrt(amp2);
    }
    out += kraus * rho.entries() * kraus.adjoint();
  }
  out = 0.5 * (out + out.adjoint());
  out /= out.trace().real();
  return DensityMatrix(std::move(out));
}

struct SpectralComponent {
  double weight;
  FockVector vector;
};

/// Eigen-decomposition sorted by decreasing weight. Weights below
/// kSpectralDropTolerance are dropped and the rest renormalised to sum to 1.
inline std::vector<SpectralComponent> spectral_decompose(const DensityMatrix& rho) {
  const CMatrix& m = rho.entries();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  std::vector<SpectralComponent> out;
  double total = 0.0;
  // Eigen sorts eigenvalues ascending; walk backwards for descending weight.
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double w = es.eigenvalues()[i];
    if (w < kSpectralDropTolerance) continue;
    out.push_back({w, FockVector::normalized(es.eigenvectors().col(i))});
    total += w;
  }
  for (auto& c : out) c.weight /= total;
  return out;
}

}  // namespace hetcv
