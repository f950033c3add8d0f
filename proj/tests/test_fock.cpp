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

#include <gtest/gtest.h>

#include <random>

#include "hetcv/fock.hpp"
#include "hetcv/numeric.hpp"
#include "hetcv/random_states.hpp"
#include "test_support.hpp"

namespace hetcv {
namespace {

using testing::ref_binomial;
using testing::ref_coherent;
using testing::ref_factorial;

TEST(Numeric, FactorialAndBinomial) {
  for (int n = 0; n <= 20; ++n) EXPECT_EQ(factorial(n), ref_factorial(n));
  EXPECT_NEAR(log_factorial(170), std::lgamma(171.0), 1e-9);
  EXPECT_EQ(binomial(10, 3), 120.0);
  EXPECT_EQ(binomial(20, 10), 184756.0);
  EXPECT_NEAR(binomial(40, 20), 137846528820.0, 1e-3);
  EXPECT_EQ(log_binomial(5, 7), -std::numeric_limits<double>::infinity());
  // 10^12 choose 4 * 10^6 stays finite in log space.
  EXPECT_TRUE(std::isfinite(log_binomial(1'000'000'000'000LL, 4'000'000LL)));
}

TEST(Numeric, LogBinomialLargeArguments) {
  // 40-digit mpmath values.
  EXPECT_NEAR(log_binomial(999'996'000'000LL, 4'000'000LL), 53716832.267463853386, 1e-7);
  EXPECT_NEAR(log_binomial(200000, 7), 76.917242156508283431, 1e-12);
  EXPECT_NEAR(log_binomial(300000, 150000), 207937.6226069207956, 1e-9);
  EXPECT_NEAR(log_binomial(1'000'000'000'000LL, 1), 27.631021115928548208, 1e-13);
  EXPECT_NEAR(log_binomial(1'000'000'000'000LL, 999'999'999'999LL), 27.631021115928548208, 1e-13);
}

TEST(Numeric, LogSumExp) {
  const std::vector<double> xs{std::log(1.0), std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(xs), std::log(6.0), 1e-15);
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> none;
  EXPECT_EQ(log_sum_exp(none), -std::numeric_limits<double>::infinity());
}

TEST(Numeric, CompensatedSum) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);
}

TEST(FockVector, ValidatesNormalisation) {
  EXPECT_NO_THROW(FockVector(CVector::Unit(3, 1)));
  CVector v(2);
  v << 1.0, 0.1;
  try {
    FockVector bad(v);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("0.01"), std::string::npos) << e.what();
  }
  EXPECT_NEAR(FockVector::normalized(v).amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(FockVector::normalized(CVector::Zero(2)), ValidationError);
}

TEST(FockVector, BasisAndPadding) {
  const auto v = FockVector::basis(2, 3);
  EXPECT_EQ(v.cutoff(), 3);
  EXPECT_EQ(v[2], cplx(1.0));
  const auto p = v.padded(5);
  EXPECT_EQ(p.cutoff(), 5);
  EXPECT_EQ(p[5], cplx(0.0));
  EXPECT_THROW(v.padded(1), ParameterError);
  EXPECT_THROW(FockVector::basis(4, 3), ParameterError);
}

TEST(DensityMatrix, TraceResidualIsReported) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.6;
  m(1, 1) = 0.3;
  try {
    DensityMatrix bad(m);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("trace residual = 0.1"), std::string::npos) << e.what();
  }
}

TEST(DensityMatrix, RejectsNonHermitianAndNegative) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{m}, ValidationError);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;
  try {
    DensityMatrix bad(neg);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("minimum eigenvalue"), std::string::npos);
  }
}

TEST(DensityMatrix, PlusStateFromMatrix) {
  CMatrix m = CMatrix::Constant(2, 2, 0.5);
  const DensityMatrix rho(m);
  const auto comps = spectral_decompose(rho);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_NEAR(comps[0].weight, 1.0, 1e-12);
}

TEST(Fidelity, PureAndPadded) {
  const auto psi = FockVector::normalized(CVector::Ones(2));
  EXPECT_NEAR(fidelity_pure(psi, DensityMatrix::pure(psi)), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_pure(psi, DensityMatrix::fock(0, 1)), 0.5, 1e-15);
  EXPECT_THROW(fidelity_pure(psi, DensityMatrix::fock(0, 3)), ParameterError);
  EXPECT_NEAR(fidelity_pure(psi, DensityMatrix::fock(0, 3), CutoffPolicy::kZeroPad), 0.5, 1e-15);
}

TEST(TraceDistance, KnownValues) {
  const auto a = DensityMatrix::fock(0, 2);
  const auto b = DensityMatrix::fock(2, 2);
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-15);
  const auto mixed = DensityMatrix::diagonal({0.75, 0.25});
  EXPECT_NEAR(trace_distance(DensityMatrix::fock(0, 1), mixed), 0.25, 1e-12);
}

TEST(TraceDistance, FuchsVanDeGraaf) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const int e = 1 + t % 4;
    const auto psi = random_fock_vector(e, rng);
    const auto rho = random_density_matrix(e, rng);
    const double f = fidelity_pure(psi, rho);
    const double d = trace_distance(DensityMatrix::pure(psi), rho);
    EXPECT_LE(1.0 - std::sqrt(f), d + 1e-12);
    EXPECT_LE(d, std::sqrt(1.0 - f) + 1e-12);
  }
}

TEST(Coherent, MatchesDirectFormula) {
  const cplx alpha(0.7, -1.3);
  for (int n = 0; n <= 12; ++n) {
    const cplx want = ref_coherent(alpha, n);
    EXPECT_NEAR(std::abs(coherent_overlap(alpha, n) - want), 0.0, 1e-14);
  }
  EXPECT_EQ(coherent_overlap(0.0, 0), cplx(1.0));
  EXPECT_EQ(coherent_overlap(0.0, 3), cplx(0.0));
  EXPECT_THROW(coherent_overlap(1.0, 301), ParameterError);
}

TEST(Coherent, LargeIndexNoOverflow) {
  const double total = [] {
    double s = 0.0;
    for (int n = 0; n <= 300; ++n) s += std::norm(coherent_overlap(cplx(10.0, 0.0), n));
    return s;
  }();
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Loss, SinglePhoton) {
  const auto out = apply_loss(DensityMatrix::fock(1, 1), 0.8);
  EXPECT_NEAR(out(1, 1).real(), 0.8, 1e-15);
  EXPECT_NEAR(out(0, 0).real(), 0.2, 1e-15);
}

TEST(Loss, CoherenceScalesWithSqrtTau) {
  const auto plus = FockVector::normalized(CVector::Ones(2));
  const auto out = apply_loss(DensityMatrix::pure(plus), 0.64);
  EXPECT_NEAR(out(0, 1).real(), 0.5 * 0.8, 1e-15);
  EXPECT_NEAR(out(0, 0).real(), 0.5 + 0.5 * 0.36, 1e-15);
}

TEST(Loss, PreservesTraceAndPositivity) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto rho = random_density_matrix(4, rng);
    const double tau = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    EXPECT_NO_THROW({
      const auto out = apply_loss(rho, tau);
      EXPECT_NEAR(out.entries().trace().real(), 1.0, 1e-12);
    });
  }
  EXPECT_THROW(apply_loss(DensityMatrix::fock(0, 0), 1.5), ParameterError);
}

TEST(Spectral, ReconstructsState) {
  std::mt19937_64 rng(5);
  const auto rho = random_density_matrix(3, rng, 2);
  const auto comps = spectral_decompose(rho);
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_GE(comps[0].weight, comps[1].weight);
  CMatrix back = CMatrix::Zero(4, 4);
  for (const auto& c : comps) back += c.weight * c.vector.amplitudes() * c.vector.amplitudes().adjoint();
  EXPECT_LT((back - rho.entries()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RandomStates, AreValid) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    EXPECT_NO_THROW(random_density_matrix(5, rng));
    EXPECT_NO_THROW(random_fock_vector(5, rng));
  }
}

}  // namespace
}  // namespace hetcv
